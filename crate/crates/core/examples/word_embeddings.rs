//! Trains skip-gram and CBOW vectors on a planted two-cluster corpus,
//! prints neighbours of a word and round-trips the model file.
//!
//! cargo run --release --example word_embeddings

use intent_miner::corpus::{generate_synthetic, GeneratorSpec};
use intent_miner::embeddings::{
    cosine_similarity, gradient_check, load_model, save_model, train_with_stats, Architecture, TrainingConfig,
};

fn main() -> intent_miner::Result<()> {
    let spec = GeneratorSpec::new(2000, 3)
        .cluster("delivery", &["late", "parcel", "courier", "delay", "track", "arrive", "shipment", "wait"])
        .cluster("billing", &["invoice", "charge", "card", "refund", "payment", "bill", "price", "fee"])
        .noise(0.1);
    let docs: Vec<Vec<String>> = generate_synthetic(&spec)?
        .iter()
        .map(|t| t.body.split(' ').map(str::to_string).collect())
        .collect();

    for arch in [Architecture::SkipGram, Architecture::Cbow] {
        let config = TrainingConfig {
            architecture: arch,
            dim: 50,
            window: 2,
            epochs: 10,
            min_count: 1,
            seed: 1,
            ..TrainingConfig::default()
        };
        let check = gradient_check(&TrainingConfig { dim: 8, ..config.clone() }, &docs[..3], 1e-5)?;
        let (model, stats) = train_with_stats(&docs, &config)?;
        println!("{arch}: gradient check rel. error {:.1e}", check.max_relative_error);
        println!("  loss per epoch {:.3?}", stats.epoch_losses);
        println!("  neighbours of `late`:");
        for (w, s) in model.nearest_neighbors("late", 7)? {
            println!("    {w}\t{s:.4}");
        }
        let a = model.sentence_embedding(&["parcel", "late"]).unwrap();
        let b = model.sentence_embedding(&["courier", "delay"]).unwrap();
        let c = model.sentence_embedding(&["invoice", "charge"]).unwrap();
        println!(
            "  sim(parcel late, courier delay) {:.3}  sim(parcel late, invoice charge) {:.3}",
            cosine_similarity(&a, &b)?,
            cosine_similarity(&a, &c)?
        );

        let path = std::env::temp_dir().join(format!("intent-miner-{arch}.vec"));
        save_model(&model, &path)?;
        let back = load_model(&path)?;
        println!("  reloaded {} words, fingerprint {}", back.vocabulary().len(), back.fingerprint());
    }
    Ok(())
}

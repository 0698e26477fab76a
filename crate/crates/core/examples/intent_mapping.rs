//! Trains embeddings on the bundled synthetic desk, embeds the taxonomy and
//! ranks a few tickets, then scores 400 labelled tickets.
//!
//! cargo run --release --example intent_mapping

use intent_miner::corpus::{generate_synthetic, Ticket};
use intent_miner::demo;
use intent_miner::embeddings::{train, Architecture, TrainingConfig};
use intent_miner::eval::evaluate;
use intent_miner::intent::{embed_taxonomy, Mapper, MappingConfig};
use intent_miner::preprocess::{run_pipeline, PatternLibrary, PipelineMode};

fn main() -> intent_miner::Result<()> {
    let corpus = generate_synthetic(&demo::training_spec(10_000, 7))?;
    let lib = PatternLibrary::default();
    let docs: Vec<Vec<String>> = corpus
        .iter()
        .map(|t| run_pipeline(t, PipelineMode::Embedding, &lib).tokens)
        .collect();
    let config = TrainingConfig {
        architecture: Architecture::SkipGram,
        dim: 100,
        min_count: 1,
        seed: 7,
        ..TrainingConfig::default()
    };
    let model = train(&docs, &config)?;
    let taxonomy = demo::taxonomy();
    let etx = embed_taxonomy(&taxonomy, &model)?;
    let mapper = Mapper::new(&model, &etx, MappingConfig::default())?;

    let tickets = [
        Ticket::new("a", "Hello team. My parcel still has not arrived, the courier is late!"),
        Ticket::new("b", "I want to close my account. Thanks.").with_subject("cancel membership"),
        Ticket::new("c", "The coupon fails at checkout and the box came with a crack."),
    ];
    for t in &tickets {
        let r = mapper.rank(t)?;
        println!("{} (narrowed to {:?})", t.id, r.domain);
        for e in r.entries.iter().take(3) {
            println!("  {:<22} {:.3}  sentence {} variation {}", e.use_case, e.score, e.sentence_index, e.variation_index);
        }
    }

    let (labelled_tickets, labels) = demo::labelled_tickets(400, 0.3, 11)?;
    let report = evaluate(&labels, &labelled_tickets, &etx, &model, &MappingConfig::default(), 3)?;
    println!("\n{}", report.to_csv_string());
    Ok(())
}

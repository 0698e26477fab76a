//! Evaluates both architectures at three dimensions on the bundled labelled
//! tickets and prints the comparison table.
//!
//! cargo run --release --example model_comparison

use intent_miner::corpus::generate_synthetic;
use intent_miner::demo;
use intent_miner::embeddings::{train, Architecture, TrainingConfig};
use intent_miner::eval::{compare_models, evaluate};
use intent_miner::intent::{embed_taxonomy, MappingConfig};
use intent_miner::preprocess::{run_pipeline, PatternLibrary, PipelineMode};

fn main() -> intent_miner::Result<()> {
    let corpus = generate_synthetic(&demo::training_spec(10_000, 10))?;
    let lib = PatternLibrary::default();
    let docs: Vec<Vec<String>> = corpus
        .iter()
        .map(|t| run_pipeline(t, PipelineMode::Embedding, &lib).tokens)
        .collect();
    let (tickets, labels) = demo::labelled_tickets(400, 0.3, 11)?;
    let taxonomy = demo::taxonomy();

    let mut reports = Vec::new();
    for arch in [Architecture::SkipGram, Architecture::Cbow] {
        for dim in [100, 200, 300] {
            let config = TrainingConfig {
                architecture: arch,
                dim,
                min_count: 1,
                seed: 10,
                ..TrainingConfig::default()
            };
            let model = train(&docs, &config)?;
            let etx = embed_taxonomy(&taxonomy, &model)?;
            reports.push(evaluate(&labels, &tickets, &etx, &model, &MappingConfig::default(), 3)?);
        }
    }
    print!("{}", compare_models(&reports)?.to_text());
    Ok(())
}

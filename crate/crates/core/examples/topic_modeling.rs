//! Chooses the number of LDA topics by held-out perplexity and prints
//! the keyword report of the winner.
//!
//! cargo run --release --example topic_modeling

use intent_miner::corpus::generate_synthetic;
use intent_miner::demo;
use intent_miner::preprocess::{run_pipeline, PatternLibrary, PipelineMode};
use intent_miner::topics::{fit_lda, grid_search, render_report, BowCorpus, GridSpec, LdaParams};

fn main() -> intent_miner::Result<()> {
    let tickets = generate_synthetic(&demo::training_spec(1500, 5))?;
    let lib = PatternLibrary::default();
    let docs: Vec<Vec<String>> = tickets
        .iter()
        .map(|t| run_pipeline(t, PipelineMode::TopicMapping, &lib).tokens)
        .collect();
    let bow = BowCorpus::from_token_docs(&docs);

    let spec = GridSpec {
        ks: vec![2, 4, 8, 12],
        alphas: vec![0.05, 0.1],
        iterations: 200,
        seed: 5,
        ..GridSpec::default()
    };
    let grid = grid_search(&bow, &spec)?;
    let mut csv = Vec::new();
    grid.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let best = grid.best_row();
    let model = fit_lda(
        &bow,
        LdaParams {
            k: best.k,
            alpha: best.alpha,
            beta: best.beta,
            iterations: 300,
            seed: 5,
        },
    )?;
    println!("\n{}", render_report(&model, 6)?);
    Ok(())
}

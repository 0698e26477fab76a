//! Normalization, both pipeline modes, and boilerplate mining.
//!
//! cargo run --example preprocessing

use intent_miner::corpus::{Ticket, TicketCollection};
use intent_miner::preprocess::{mine_patterns, normalize, run_pipeline, PipelineMode};

const FOOTER: &str = "This email is confidential do not share";

fn main() -> intent_miner::Result<()> {
    let raw = "<p>Hi team,</p> My ORDERS were delivered late!\nSee https://example.com or mail me@example.com";
    println!("normalized: {:?}", normalize(raw));

    let tickets: Vec<Ticket> = [
        "The boxes arrived broken.",
        "Where is my parcel? It was promised yesterday.",
        "I am closing my account",
    ]
    .iter()
    .enumerate()
    .map(|(i, body)| Ticket::new(format!("t{i}"), format!("{body}\n{FOOTER}")))
    .collect();
    let collection = TicketCollection::new(tickets, "inline")?;

    let lib = mine_patterns(&collection, 0.8)?;
    println!("mined patterns: {:?}", lib.patterns());

    for t in collection.iter() {
        let emb = run_pipeline(t, PipelineMode::Embedding, &lib);
        let map = run_pipeline(t, PipelineMode::TopicMapping, &lib);
        println!("{}", t.id);
        println!("  embedding    {:?}", emb.tokens);
        println!("  topicmapping {:?}", map.sentences.unwrap_or_default());
    }
    Ok(())
}

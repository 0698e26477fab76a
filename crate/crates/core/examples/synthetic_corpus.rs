//! Builds a small synthetic ticket corpus, writes it as CSV and reads it back.
//!
//! cargo run --example synthetic_corpus

use intent_miner::corpus::{generate_synthetic, read_tickets, synthetic_label, write_tickets, GeneratorSpec};

fn main() -> intent_miner::Result<()> {
    let spec = GeneratorSpec::new(6, 42)
        .cluster("shipping", &["parcel", "courier", "late", "track", "delivery"])
        .plant("refund", &["i want a refund", "please return my money"])
        .noise(0.1);
    let corpus = generate_synthetic(&spec)?;

    let mut csv = Vec::new();
    write_tickets(&mut csv, &corpus)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let back = read_tickets(csv.as_slice(), "memory")?;
    assert_eq!(back.tickets(), corpus.tickets());
    for t in back.iter() {
        println!("{} -> source {:?}", t.id, synthetic_label(&t.id));
    }
    println!("\nspec as JSON:\n{}", serde_json::to_string_pretty(&spec)?);
    Ok(())
}

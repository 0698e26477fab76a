//! Unsupervised intent mining for customer-service tickets.
//!
//! The crate covers the whole workflow:
//!
//! - [`corpus`]: ticket CSV ingestion and seeded synthetic corpora with planted labels.
//! - [`preprocess`]: normalization, boilerplate pattern mining and the two token
//!   pipelines (embedding training vs. topic modelling / intent mapping).
//! - [`embeddings`]: CBOW and skip-gram word2vec with negative sampling, cosine
//!   similarity, neighbours and norm-averaged sentence vectors.
//! - [`topics`]: collapsed Gibbs LDA, held-out perplexity, grid search and keyword reports.
//! - [`intent`]: the intent taxonomy and the ranking of use cases per ticket.
//! - [`eval`]: accuracy tables against labelled tickets.
//! - [`cli`]: the `intent-miner` command line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod corpus;
pub mod demo;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod intent;
pub mod preprocess;
pub mod topics;

pub use error::{Error, Result};

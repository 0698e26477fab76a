//! LDA topic modelling with collapsed Gibbs sampling.
//!
//! Topics are selected by held-out perplexity over a hyperparameter grid and
//! summarized as keyword reports for whoever authors the intent taxonomy.

mod bow;
mod grid;
mod lda;
mod metrics;
mod report;

pub use bow::BowCorpus;
pub use grid::{grid_search, GridResult, GridRow, GridSpec};
pub use lda::{fit_lda, load_lda, save_lda, GibbsSampler, LdaModel, LdaParams};
pub use metrics::{
    fold_in, infer_doc_topics, infer_doc_topics_with, log_likelihood, perplexity, PerplexityResult,
    DEFAULT_FOLD_IN_ITERATIONS,
};
pub use report::{render_report, top_keywords, topics_report};

//! Word2vec embeddings trained from scratch.

mod gradcheck;
mod model;
mod similarity;
mod train;
mod vocab;

pub use gradcheck::{gradient_check, GradientCheck};
pub use model::{load_model, save_model, EmbeddingModel};
pub use similarity::{cosine_similarity, norm};
pub use train::{train, train_with_stats, Architecture, TrainingConfig, TrainingStats};
pub use vocab::{build_vocabulary, Vocabulary};

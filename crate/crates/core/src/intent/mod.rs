//! Intent taxonomy and per-ticket use-case ranking.

mod mapper;
mod taxonomy;

pub use mapper::{
    classify_subject_domain, classify_subject_vector, rank_embedded, rank_intents, rank_intents_batch,
    score_matrix, IntentMatch, IntentRanking, Mapper, MappingConfig, RankingRecord,
};
pub use taxonomy::{
    embed_taxonomy, load_taxonomy, EmbeddedTaxonomy, EmbeddedUseCase, IntentDomain, IntentUseCase, Taxonomy,
};

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::taxonomy::EmbeddedTaxonomy;
use crate::corpus::{Ticket, TicketCollection};
use crate::embeddings::{cosine_similarity, norm, EmbeddingModel};
use crate::error::{Error, Result};
use crate::preprocess::{mapping_tokens_of, process_text, PatternLibrary, PipelineMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    /// Minimum best subject score that narrows ranking to one domain.
    pub subject_threshold: f64,
    pub top_n: usize,
    pub min_score: f64,
    pub subject_narrowing: bool,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            subject_threshold: 0.75,
            top_n: 5,
            min_score: 0.0,
            subject_narrowing: true,
        }
    }
}

impl MappingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(Error::invalid("top_n must be >= 1"));
        }
        if !self.subject_threshold.is_finite() {
            return Err(Error::invalid("subject_threshold must be finite"));
        }
        if !(-1.0..=1.0).contains(&self.min_score) {
            return Err(Error::invalid("min_score must lie in [-1, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentMatch {
    pub domain: String,
    pub use_case: String,
    pub score: f64,
    /// Position of the best sentence in the split ticket body.
    pub sentence_index: usize,
    pub variation_index: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntentRanking {
    pub entries: Vec<IntentMatch>,
    /// Domain picked from the subject, when narrowing fired.
    pub domain: Option<String>,
    pub subject_narrowed: bool,
    pub no_embeddable_sentences: bool,
}

impl IntentRanking {
    pub fn top(&self) -> Option<&IntentMatch> {
        self.entries.first()
    }
}

/// Entry `(n, k)` is the cosine of sentence `n` and variation `k`.
pub fn score_matrix(sentences: &[Vec<f64>], variations: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    sentences
        .iter()
        .map(|s| variations.iter().map(|v| cosine_similarity(s, v)).collect())
        .collect()
}

/// Best domain for an embedded subject and its score, if the score reaches `threshold`.
pub fn classify_subject_vector(subject: &[f64], etx: &EmbeddedTaxonomy, threshold: f64) -> Result<Option<(usize, f64)>> {
    let mut best: Vec<f64> = vec![f64::NEG_INFINITY; etx.taxonomy().domains.len()];
    for u in etx.use_cases() {
        for v in &u.variations {
            let c = cosine_similarity(subject, v)?;
            if c > best[u.domain] {
                best[u.domain] = c;
            }
        }
    }
    let mut arg = 0;
    for (d, &s) in best.iter().enumerate() {
        if s > best[arg] {
            arg = d;
        }
    }
    Ok((best[arg] >= threshold).then_some((arg, best[arg])))
}

/// Domain name the subject points at, or `None` for no, empty or unembeddable subjects.
pub fn classify_subject_domain(
    subject: Option<&str>,
    etx: &EmbeddedTaxonomy,
    model: &EmbeddingModel,
    threshold: f64,
) -> Option<String> {
    let v = embed_subject(subject?, model)?;
    classify_subject_vector(&v, etx, threshold)
        .ok()
        .flatten()
        .map(|(d, _)| etx.domain_name(d).to_string())
}

fn embed_subject(subject: &str, model: &EmbeddingModel) -> Option<Vec<f64>> {
    model
        .sentence_embedding(&mapping_tokens_of(subject))
        .filter(|v| norm(v) > 0.0)
}

/// Ranks use cases given already embedded sentences (`None` = unembeddable)
/// and an optional embedded subject.
pub fn rank_embedded(
    sentences: &[Option<Vec<f64>>],
    subject: Option<&[f64]>,
    etx: &EmbeddedTaxonomy,
    config: &MappingConfig,
) -> Result<IntentRanking> {
    config.validate()?;
    let narrowed = match subject {
        Some(s) if config.subject_narrowing => classify_subject_vector(s, etx, config.subject_threshold)?,
        _ => None,
    };

    let kept: Vec<(usize, &Vec<f64>)> = sentences
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.as_ref().map(|v| (i, v)))
        .collect();
    let mut ranking = IntentRanking {
        domain: narrowed.map(|(d, _)| etx.domain_name(d).to_string()),
        subject_narrowed: narrowed.is_some(),
        no_embeddable_sentences: kept.is_empty(),
        entries: Vec::new(),
    };
    if kept.is_empty() {
        return Ok(ranking);
    }
    let vectors: Vec<Vec<f64>> = kept.iter().map(|(_, v)| (*v).clone()).collect();

    for u in etx.use_cases() {
        if narrowed.is_some_and(|(d, _)| d != u.domain) {
            continue;
        }
        let m = score_matrix(&vectors, &u.variations)?;
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (n, row) in m.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                if c > best.0 {
                    best = (c, n, k);
                }
            }
        }
        if best.0 < config.min_score {
            continue;
        }
        ranking.entries.push(IntentMatch {
            domain: etx.domain_name(u.domain).to_string(),
            use_case: u.name.clone(),
            score: best.0,
            sentence_index: kept[best.1].0,
            variation_index: best.2,
        });
    }
    // stable: equal scores keep declaration order
    ranking
        .entries
        .sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal));
    ranking.entries.truncate(config.top_n);
    Ok(ranking)
}

/// Maps tickets onto an embedded taxonomy.
#[derive(Debug, Clone)]
pub struct Mapper<'a> {
    model: &'a EmbeddingModel,
    taxonomy: &'a EmbeddedTaxonomy,
    config: MappingConfig,
    patterns: PatternLibrary,
}

impl<'a> Mapper<'a> {
    pub fn new(model: &'a EmbeddingModel, taxonomy: &'a EmbeddedTaxonomy, config: MappingConfig) -> Result<Self> {
        config.validate()?;
        if taxonomy.model_fingerprint() != model.fingerprint() {
            return Err(Error::invalid("taxonomy was embedded with a different model"));
        }
        Ok(Mapper {
            model,
            taxonomy,
            config,
            patterns: PatternLibrary::default(),
        })
    }

    /// Boilerplate lines removed from bodies before sentence splitting.
    pub fn with_patterns(mut self, patterns: PatternLibrary) -> Self {
        self.patterns = patterns;
        self
    }

    pub fn config(&self) -> &MappingConfig {
        &self.config
    }

    pub fn rank(&self, ticket: &Ticket) -> Result<IntentRanking> {
        let processed = process_text(&ticket.body, PipelineMode::TopicMapping, &self.patterns);
        let sentences: Vec<Option<Vec<f64>>> = processed
            .sentences
            .unwrap_or_default()
            .iter()
            .map(|s| self.model.sentence_embedding(s).filter(|v| norm(v) > 0.0))
            .collect();
        let subject = ticket
            .subject
            .as_deref()
            .and_then(|s| embed_subject(s, self.model));
        rank_embedded(&sentences, subject.as_deref(), self.taxonomy, &self.config)
    }

    /// One result per ticket, in input order; failures stay per ticket.
    pub fn rank_batch(&self, collection: &TicketCollection) -> Vec<Result<IntentRanking>> {
        collection.tickets().par_iter().map(|t| self.rank(t)).collect()
    }
}

pub fn rank_intents(
    ticket: &Ticket,
    etx: &EmbeddedTaxonomy,
    model: &EmbeddingModel,
    config: &MappingConfig,
) -> Result<IntentRanking> {
    Mapper::new(model, etx, config.clone())?.rank(ticket)
}

pub fn rank_intents_batch(
    collection: &TicketCollection,
    etx: &EmbeddedTaxonomy,
    model: &EmbeddingModel,
    config: &MappingConfig,
) -> Result<Vec<Result<IntentRanking>>> {
    Ok(Mapper::new(model, etx, config.clone())?.rank_batch(collection))
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRecord {
    pub id: String,
    pub subject_threshold: f64,
    pub domain: Option<String>,
    pub subject_narrowed: bool,
    pub no_embeddable_sentences: bool,
    pub intents: Vec<IntentMatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RankingRecord {
    pub fn new(id: &str, config: &MappingConfig, result: &Result<IntentRanking>) -> Self {
        let (ranking, error) = match result {
            Ok(r) => (r.clone(), None),
            Err(e) => (IntentRanking::default(), Some(e.to_string())),
        };
        RankingRecord {
            id: id.to_string(),
            subject_threshold: config.subject_threshold,
            domain: ranking.domain,
            subject_narrowed: ranking.subject_narrowed,
            no_embeddable_sentences: ranking.no_embeddable_sentences,
            intents: ranking.entries,
            error,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

//! Text cleaning and the two token pipelines.
//!
//! Embedding training sees every token that survives normalization and
//! boilerplate stripping. Topic modelling and intent mapping additionally
//! drop stopwords and lemmatize, and keep sentence boundaries.

mod lemma;
mod patterns;

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Ticket;

pub use lemma::{lemmatize, lemmatize_word};
pub use patterns::{load_patterns, mine_patterns, save_patterns, strip_patterns, PatternLibrary};

/// Tokens longer than this are dropped by [`normalize`].
pub const MAX_TOKEN_LEN: usize = 30;

static STOPWORDS_TXT: &str = include_str!("../../data/stopwords.txt");

static STOPWORDS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| data_lines(STOPWORDS_TXT).collect());

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|ftp://|www\.)\S*").unwrap());
static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,}").unwrap());
static MARKUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^<>]*>").unwrap());

/// Non-comment, non-blank lines of a bundled data file.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineMode {
    /// Everything kept; input for word2vec training.
    Embedding,
    /// Stopwords removed and lemmatized; input for LDA and intent mapping.
    TopicMapping,
}

impl std::str::FromStr for PipelineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "embedding" => Ok(PipelineMode::Embedding),
            "topicmapping" | "topic-mapping" | "topic_mapping" => Ok(PipelineMode::TopicMapping),
            other => Err(format!("unknown pipeline mode `{other}`")),
        }
    }
}

/// Lowercases and cleans raw text while keeping its line structure.
///
/// Markup tags, URLs and e-mail addresses are replaced by a space, non-ASCII
/// characters are deleted, tokens over [`MAX_TOKEN_LEN`] characters are
/// dropped, and whitespace is collapsed within each line. Blank lines vanish.
pub fn normalize(raw: &str) -> String {
    let ascii: String = raw
        .chars()
        .filter_map(|c| match c {
            '\n' => Some('\n'),
            '\r' | '\t' => Some(' '),
            c if c.is_ascii() && !c.is_ascii_control() => Some(c.to_ascii_lowercase()),
            _ => None,
        })
        .collect();

    let mut text = ascii;
    loop {
        let next = MARKUP.replace_all(&text, " ");
        if next == text {
            break;
        }
        text = next.into_owned();
    }
    let text = URL.replace_all(&text, " ");
    let text = EMAIL.replace_all(&text, " ");

    let mut out = String::with_capacity(text.len());
    for line in text.split('\n') {
        let mut kept = line.split(' ').filter(|w| !w.is_empty() && w.len() <= MAX_TOKEN_LEN);
        let Some(first) = kept.next() else { continue };
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(first);
        for w in kept {
            out.push(' ');
            out.push_str(w);
        }
    }
    out
}

/// Splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Splits on `.`, `?`, `!`, `;` and newlines; fragments are trimmed and
/// empty ones dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    text.split(['.', '?', '!', ';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(token)
}

pub fn stopwords() -> impl Iterator<Item = &'static str> {
    data_lines(STOPWORDS_TXT)
}

pub fn remove_stopwords(tokens: &[String]) -> Vec<String> {
    tokens.iter().filter(|t| !is_stopword(t)).cloned().collect()
}

/// Output of [`run_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Processed {
    pub tokens: Vec<String>,
    /// Per-sentence tokens, TopicMapping mode only. Sentences that lose every
    /// token are kept as empty lists so indices line up with [`split_sentences`].
    pub sentences: Option<Vec<Vec<String>>>,
}

/// Runs a ticket body through the pipeline for `mode`.
pub fn run_pipeline(ticket: &Ticket, mode: PipelineMode, lib: &PatternLibrary) -> Processed {
    process_text(&ticket.body, mode, lib)
}

/// The pipeline applied to arbitrary text (subjects, variations, queries).
pub fn process_text(text: &str, mode: PipelineMode, lib: &PatternLibrary) -> Processed {
    let cleaned = strip_patterns(&normalize(text), lib);
    match mode {
        PipelineMode::Embedding => Processed {
            tokens: tokenize(&cleaned),
            sentences: None,
        },
        PipelineMode::TopicMapping => {
            let sentences: Vec<Vec<String>> = split_sentences(&cleaned)
                .iter()
                .map(|s| mapping_tokens(s))
                .collect();
            Processed {
                tokens: sentences.concat(),
                sentences: Some(sentences),
            }
        }
    }
}

/// Tokens of an already-normalized fragment in TopicMapping form.
fn mapping_tokens(text: &str) -> Vec<String> {
    lemmatize(&remove_stopwords(&tokenize(text)))
}

/// TopicMapping tokens of a short text, ignoring sentence structure.
pub fn mapping_tokens_of(text: &str) -> Vec<String> {
    mapping_tokens(&normalize(text))
}

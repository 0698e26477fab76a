//! Boilerplate mining: lines (disclaimers, signatures, system text) that
//! recur across many tickets are collected and later deleted.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::{normalize, tokenize};
use crate::corpus::TicketCollection;
use crate::error::{Error, Result};

/// Shortest line, in tokens, that can become a pattern.
pub const MIN_PATTERN_TOKENS: usize = 4;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatternLibrary {
    patterns: Vec<String>,
    lookup: HashSet<String>,
    min_doc_frequency: f64,
}

impl PatternLibrary {
    pub fn new(patterns: Vec<String>, min_doc_frequency: f64) -> Result<Self> {
        if !(min_doc_frequency > 0.0 && min_doc_frequency <= 1.0) {
            return Err(Error::invalid(format!(
                "min_doc_frequency {min_doc_frequency} outside (0, 1]"
            )));
        }
        let mut lookup = HashSet::with_capacity(patterns.len());
        for p in &patterns {
            if p.is_empty() {
                return Err(Error::invalid("empty pattern"));
            }
            if normalize(p) != *p || p.contains('\n') {
                return Err(Error::invalid(format!("pattern `{p}` is not normalized")));
            }
            lookup.insert(p.clone());
        }
        Ok(PatternLibrary {
            patterns,
            lookup,
            min_doc_frequency,
        })
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn min_doc_frequency(&self) -> f64 {
        self.min_doc_frequency
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, line: &str) -> bool {
        self.lookup.contains(line)
    }
}

/// Returns every normalized body line of at least [`MIN_PATTERN_TOKENS`]
/// tokens whose document frequency reaches `min_doc_frequency`, most frequent
/// first and lexicographic among equals.
pub fn mine_patterns(collection: &TicketCollection, min_doc_frequency: f64) -> Result<PatternLibrary> {
    if collection.is_empty() {
        return Err(Error::invalid("cannot mine patterns from an empty collection"));
    }
    if !(min_doc_frequency > 0.0 && min_doc_frequency <= 1.0) {
        return Err(Error::invalid(format!(
            "min_doc_frequency {min_doc_frequency} outside (0, 1]"
        )));
    }
    let mut df: HashMap<String, usize> = HashMap::new();
    for ticket in collection {
        let text = normalize(&ticket.body);
        let lines: HashSet<&str> = text
            .lines()
            .filter(|l| tokenize(l).len() >= MIN_PATTERN_TOKENS)
            .collect();
        for l in lines {
            *df.entry(l.to_string()).or_default() += 1;
        }
    }
    let n = collection.len() as f64;
    let mut kept: Vec<(String, usize)> = df
        .into_iter()
        .filter(|&(_, c)| c as f64 / n >= min_doc_frequency)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    PatternLibrary::new(kept.into_iter().map(|(l, _)| l).collect(), min_doc_frequency)
}

/// Deletes every line equal to a library pattern. `text` must already be
/// normalized.
pub fn strip_patterns(text: &str, lib: &PatternLibrary) -> String {
    if lib.is_empty() {
        return text.to_string();
    }
    text.split('\n')
        .filter(|l| !lib.contains(l))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One pattern per line; a leading comment records the threshold.
pub fn save_patterns(path: impl AsRef<Path>, lib: &PatternLibrary) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("# min_doc_frequency = {}\n", lib.min_doc_frequency);
    for p in &lib.patterns {
        out.push_str(p);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_patterns(path: impl AsRef<Path>) -> Result<PatternLibrary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut min_df = 1.0;
    let mut patterns = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("min_doc_frequency") {
                let v = v.trim_start_matches([' ', '=']).trim();
                min_df = v.parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: i + 1,
                    message: format!("bad min_doc_frequency `{v}`"),
                })?;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if normalize(line) != line {
            return Err(Error::Parse {
                path: path.into(),
                line: i + 1,
                message: "pattern is not normalized".into(),
            });
        }
        patterns.push(line.to_string());
    }
    PatternLibrary::new(patterns, min_df)
}

//! Ticket collections: CSV ingestion and seeded synthetic corpora.
//!
//! The on-disk format is RFC-4180 CSV with a header row. `id` and `body` are
//! required columns; `subject`, `open_date` and `priority` are optional and an
//! empty cell is read as an absent value.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prefix carried by the ids of generated tickets.
pub const SYNTHETIC_ID_PREFIX: &str = "syn-";

const COLUMNS: [&str; 5] = ["id", "subject", "body", "open_date", "priority"];

/// One support interaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    pub subject: Option<String>,
    pub body: String,
    pub open_date: Option<String>,
    pub priority: Option<String>,
}

impl Ticket {
    pub fn new(id: impl Into<String>, body: impl Into<String>) -> Self {
        Ticket {
            id: id.into(),
            subject: None,
            body: body.into(),
            open_date: None,
            priority: None,
        }
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = non_empty(subject.into());
        self
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty ticket id".into());
        }
        if self.body.is_empty() && self.subject.is_none() {
            return Err(format!("ticket `{}` has neither body nor subject", self.id));
        }
        Ok(())
    }
}

fn non_empty(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// An ordered, immutable set of tickets with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TicketCollection {
    tickets: Vec<Ticket>,
    source: String,
}

impl TicketCollection {
    /// Builds a collection, rejecting duplicate or empty ids.
    pub fn new(tickets: Vec<Ticket>, source: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tickets.len());
        for t in &tickets {
            t.check().map_err(Error::Validation)?;
            if !seen.insert(t.id.as_str()) {
                return Err(Error::DuplicateId(t.id.clone()));
            }
        }
        Ok(TicketCollection {
            tickets,
            source: source.into(),
        })
    }

    pub fn tickets(&self) -> &[Ticket] {
        &self.tickets
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.tickets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tickets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ticket> {
        self.tickets.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Ticket> {
        self.tickets.iter().find(|t| t.id == id)
    }
}

impl<'a> IntoIterator for &'a TicketCollection {
    type Item = &'a Ticket;
    type IntoIter = std::slice::Iter<'a, Ticket>;

    fn into_iter(self) -> Self::IntoIter {
        self.tickets.iter()
    }
}

/// Loads a ticket CSV file.
pub fn load_tickets(path: impl AsRef<Path>) -> Result<TicketCollection> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tickets(file, path.display().to_string())
}

/// Reads tickets from any CSV source; `source` is recorded as provenance.
pub fn read_tickets<R: Read>(reader: R, source: impl Into<String>) -> Result<TicketCollection> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = column("id").ok_or_else(|| Error::MissingColumn("id".into()))?;
    let body_col = column("body").ok_or_else(|| Error::MissingColumn("body".into()))?;
    let subject_col = column("subject");
    let date_col = column("open_date");
    let priority_col = column("priority");

    let mut tickets = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Row {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let cell = |col: Option<usize>| {
            col.and_then(|c| record.get(c))
                .map(str::to_string)
                .and_then(non_empty)
        };
        let id = cell(Some(id_col)).ok_or_else(|| Error::Row {
            line,
            message: "empty id".into(),
        })?;
        let ticket = Ticket {
            id,
            subject: cell(subject_col),
            body: cell(Some(body_col)).unwrap_or_default(),
            open_date: cell(date_col),
            priority: cell(priority_col),
        };
        ticket
            .check()
            .map_err(|message| Error::Row { line, message })?;
        if !seen.insert(ticket.id.clone()) {
            return Err(Error::DuplicateId(ticket.id));
        }
        tickets.push(ticket);
    }
    Ok(TicketCollection {
        tickets,
        source: source.into(),
    })
}

/// Writes a collection with the full five-column header.
pub fn write_tickets<W: Write>(writer: W, collection: &TicketCollection) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for t in collection {
        wtr.write_record([
            t.id.as_str(),
            t.subject.as_deref().unwrap_or(""),
            t.body.as_str(),
            t.open_date.as_deref().unwrap_or(""),
            t.priority.as_deref().unwrap_or(""),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_tickets(path: impl AsRef<Path>, collection: &TicketCollection) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_tickets(std::io::BufWriter::new(file), collection)
}

// ---------------------------------------------------------------------------
// Synthetic corpora

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicCluster {
    pub name: String,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentPlant {
    pub name: String,
    pub templates: Vec<String>,
}

/// Recipe for a synthetic corpus. Every ticket is drawn from exactly one
/// source (a topic cluster or an intent plant); sources are visited
/// round-robin so labels stay balanced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n_tickets: usize,
    #[serde(default)]
    pub topic_clusters: Vec<TopicCluster>,
    #[serde(default)]
    pub intent_plants: Vec<IntentPlant>,
    #[serde(default = "default_noise_words")]
    pub noise_words: Vec<String>,
    #[serde(default)]
    pub noise_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub disjoint: bool,
    /// Inclusive token-count range of a cluster ticket body.
    #[serde(default = "default_tokens_per_ticket")]
    pub tokens_per_ticket: (usize, usize),
    /// Inclusive sentence-count range of an intent ticket body.
    #[serde(default = "default_sentences_per_ticket")]
    pub sentences_per_ticket: (usize, usize),
    /// Probability that an intent ticket gets one of its templates as subject.
    #[serde(default)]
    pub subject_rate: f64,
}

fn default_true() -> bool {
    true
}

fn default_tokens_per_ticket() -> (usize, usize) {
    (8, 16)
}

fn default_sentences_per_ticket() -> (usize, usize) {
    (1, 3)
}

pub fn default_noise_words() -> Vec<String> {
    [
        "hello", "team", "customer", "ticket", "message", "reply", "kind", "today", "agent",
        "support",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

impl GeneratorSpec {
    pub fn new(n_tickets: usize, seed: u64) -> Self {
        GeneratorSpec {
            n_tickets,
            topic_clusters: Vec::new(),
            intent_plants: Vec::new(),
            noise_words: default_noise_words(),
            noise_rate: 0.0,
            seed,
            disjoint: true,
            tokens_per_ticket: default_tokens_per_ticket(),
            sentences_per_ticket: default_sentences_per_ticket(),
            subject_rate: 0.0,
        }
    }

    pub fn cluster(mut self, name: &str, words: &[&str]) -> Self {
        self.topic_clusters.push(TopicCluster {
            name: name.to_string(),
            words: words.iter().map(|w| w.to_string()).collect(),
        });
        self
    }

    pub fn plant(mut self, name: &str, templates: &[&str]) -> Self {
        self.intent_plants.push(IntentPlant {
            name: name.to_string(),
            templates: templates.iter().map(|w| w.to_string()).collect(),
        });
        self
    }

    pub fn noise(mut self, rate: f64) -> Self {
        self.noise_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::invalid(format!(
                "noise_rate {} outside [0, 1]",
                self.noise_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.subject_rate) {
            return Err(Error::invalid("subject_rate outside [0, 1]"));
        }
        if self.noise_rate > 0.0 && self.noise_words.is_empty() {
            return Err(Error::invalid("noise_rate > 0 needs noise words"));
        }
        if self.topic_clusters.is_empty() && self.intent_plants.is_empty() {
            return Err(Error::invalid("generator has no cluster or plant"));
        }
        let (lo, hi) = self.tokens_per_ticket;
        if lo == 0 || lo > hi {
            return Err(Error::invalid("tokens_per_ticket must be a range with min >= 1"));
        }
        let (lo, hi) = self.sentences_per_ticket;
        if lo == 0 || lo > hi {
            return Err(Error::invalid(
                "sentences_per_ticket must be a range with min >= 1",
            ));
        }
        let mut names = HashSet::new();
        for c in &self.topic_clusters {
            if c.words.is_empty() || c.words.iter().any(|w| w.trim().is_empty()) {
                return Err(Error::invalid(format!(
                    "cluster `{}` has an empty vocabulary",
                    c.name
                )));
            }
            if c.name.is_empty() || !names.insert(c.name.as_str()) {
                return Err(Error::invalid(format!("bad or repeated source name `{}`", c.name)));
            }
        }
        for p in &self.intent_plants {
            if p.templates.is_empty() || p.templates.iter().any(|t| t.trim().is_empty()) {
                return Err(Error::invalid(format!(
                    "plant `{}` has an empty template list",
                    p.name
                )));
            }
            if p.name.is_empty() || !names.insert(p.name.as_str()) {
                return Err(Error::invalid(format!("bad or repeated source name `{}`", p.name)));
            }
        }
        if self.disjoint {
            let mut owner: std::collections::HashMap<&str, &str> = Default::default();
            for c in &self.topic_clusters {
                for w in &c.words {
                    if let Some(prev) = owner.insert(w.as_str(), c.name.as_str()) {
                        if prev != c.name {
                            return Err(Error::invalid(format!(
                                "word `{w}` shared by clusters `{prev}` and `{}`",
                                c.name
                            )));
                        }
                    }
                }
            }
            if let Some(w) = self
                .noise_words
                .iter()
                .find(|w| owner.contains_key(w.as_str()))
            {
                return Err(Error::invalid(format!(
                    "noise word `{w}` is also a cluster word"
                )));
            }
        }
        Ok(())
    }
}

/// Id of the `n`th generated ticket of source `label`.
pub fn synthetic_id(label: &str, n: usize) -> String {
    format!("{SYNTHETIC_ID_PREFIX}{label}-{n}")
}

/// Recovers the ground-truth source name from a generated ticket id.
pub fn synthetic_label(id: &str) -> Option<&str> {
    let rest = id.strip_prefix(SYNTHETIC_ID_PREFIX)?;
    let (label, n) = rest.rsplit_once('-')?;
    if label.is_empty() || n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(label)
}

enum Source<'a> {
    Cluster(&'a TopicCluster),
    Plant(&'a IntentPlant),
}

impl Source<'_> {
    fn name(&self) -> &str {
        match self {
            Source::Cluster(c) => &c.name,
            Source::Plant(p) => &p.name,
        }
    }
}

/// Generates a deterministic corpus from `spec`.
pub fn generate_synthetic(spec: &GeneratorSpec) -> Result<TicketCollection> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sources: Vec<Source> = spec
        .topic_clusters
        .iter()
        .map(Source::Cluster)
        .chain(spec.intent_plants.iter().map(Source::Plant))
        .collect();
    let mut counters = vec![0usize; sources.len()];
    let mut tickets = Vec::with_capacity(spec.n_tickets);

    let noisy = |rng: &mut ChaCha8Rng, word: &str| -> String {
        if spec.noise_rate > 0.0 && rng.gen::<f64>() < spec.noise_rate {
            spec.noise_words.choose(rng).unwrap().clone()
        } else {
            word.to_string()
        }
    };

    for i in 0..spec.n_tickets {
        let s = i % sources.len();
        let id = synthetic_id(sources[s].name(), counters[s]);
        counters[s] += 1;
        let ticket = match sources[s] {
            Source::Cluster(c) => {
                let len = rng.gen_range(spec.tokens_per_ticket.0..=spec.tokens_per_ticket.1);
                let words: Vec<String> = (0..len)
                    .map(|_| {
                        let w = c.words.choose(&mut rng).unwrap().clone();
                        noisy(&mut rng, &w)
                    })
                    .collect();
                Ticket::new(id, words.join(" "))
            }
            Source::Plant(p) => {
                let n = rng.gen_range(spec.sentences_per_ticket.0..=spec.sentences_per_ticket.1);
                let mut sentences = Vec::with_capacity(n);
                for _ in 0..n {
                    let template = p.templates.choose(&mut rng).unwrap();
                    let words: Vec<String> = template
                        .split_whitespace()
                        .map(|w| noisy(&mut rng, w))
                        .collect();
                    sentences.push(words.join(" "));
                }
                let mut ticket = Ticket::new(id, format!("{}.", sentences.join(". ")));
                if spec.subject_rate > 0.0 && rng.gen::<f64>() < spec.subject_rate {
                    let subject = p.templates.choose(&mut rng).unwrap();
                    ticket = ticket.with_subject(subject.clone());
                }
                ticket
            }
        };
        tickets.push(ticket);
    }
    TicketCollection::new(tickets, format!("synthetic(seed={})", spec.seed))
}

//! Flat `key = value` run configuration shared by every subcommand.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::embeddings::{Architecture, TrainingConfig};
use crate::error::{Error, Result};
use crate::intent::MappingConfig;
use crate::topics::{GridSpec, LdaParams};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "INTENT_MINER_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub min_doc_frequency: f64,
    pub embeddings: TrainingConfig,
    pub lda: LdaParams,
    pub grid: GridSpec,
    pub report_keywords: usize,
    pub mapping: MappingConfig,
    pub eval_top_k: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            threads: 0,
            min_doc_frequency: 0.5,
            embeddings: TrainingConfig::default(),
            lda: LdaParams::default(),
            grid: GridSpec::default(),
            report_keywords: 15,
            mapping: MappingConfig::default(),
            eval_top_k: 3,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse(key, v)).collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Every key in echo order.
    pub const KEYS: [&'static str; 27] = [
        "seed",
        "threads",
        "preprocess.min_doc_frequency",
        "embeddings.arch",
        "embeddings.dim",
        "embeddings.window",
        "embeddings.negatives",
        "embeddings.epochs",
        "embeddings.lr",
        "embeddings.min_count",
        "embeddings.subsample",
        "lda.k",
        "lda.alpha",
        "lda.beta",
        "lda.iterations",
        "grid.k",
        "grid.alpha",
        "grid.beta",
        "grid.iterations",
        "grid.fold_in_iterations",
        "grid.split",
        "report.keywords",
        "mapping.subject_threshold",
        "mapping.top_n",
        "mapping.min_score",
        "mapping.subject_narrowing",
        "eval.top_k",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = parse(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            "preprocess.min_doc_frequency" => self.min_doc_frequency = parse(key, v)?,
            "embeddings.arch" => self.embeddings.architecture = v.parse::<Architecture>().map_err(Error::invalid)?,
            "embeddings.dim" => self.embeddings.dim = parse(key, v)?,
            "embeddings.window" => self.embeddings.window = parse(key, v)?,
            "embeddings.negatives" => self.embeddings.negatives = parse(key, v)?,
            "embeddings.epochs" => self.embeddings.epochs = parse(key, v)?,
            "embeddings.lr" => self.embeddings.initial_lr = parse(key, v)?,
            "embeddings.min_count" => self.embeddings.min_count = parse(key, v)?,
            "embeddings.subsample" => {
                self.embeddings.subsample_t = match v {
                    "" | "off" | "none" => None,
                    _ => Some(parse(key, v)?),
                }
            }
            "lda.k" => self.lda.k = parse(key, v)?,
            "lda.alpha" => self.lda.alpha = parse(key, v)?,
            "lda.beta" => self.lda.beta = parse(key, v)?,
            "lda.iterations" => self.lda.iterations = parse(key, v)?,
            "grid.k" => self.grid.ks = parse_list(key, v)?,
            "grid.alpha" => self.grid.alphas = parse_list(key, v)?,
            "grid.beta" => self.grid.betas = parse_list(key, v)?,
            "grid.iterations" => self.grid.iterations = parse(key, v)?,
            "grid.fold_in_iterations" => self.grid.fold_in_iterations = parse(key, v)?,
            "grid.split" => self.grid.split_fraction = parse(key, v)?,
            "report.keywords" => self.report_keywords = parse(key, v)?,
            "mapping.subject_threshold" => self.mapping.subject_threshold = parse(key, v)?,
            "mapping.top_n" => self.mapping.top_n = parse(key, v)?,
            "mapping.min_score" => self.mapping.min_score = parse(key, v)?,
            "mapping.subject_narrowing" => self.mapping.subject_narrowing = parse(key, v)?,
            "eval.top_k" => self.eval_top_k = parse(key, v)?,
            _ => return Err(Error::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let e = &self.embeddings;
        Some(match key {
            "seed" => self.seed.to_string(),
            "threads" => self.threads.to_string(),
            "preprocess.min_doc_frequency" => self.min_doc_frequency.to_string(),
            "embeddings.arch" => e.architecture.to_string(),
            "embeddings.dim" => e.dim.to_string(),
            "embeddings.window" => e.window.to_string(),
            "embeddings.negatives" => e.negatives.to_string(),
            "embeddings.epochs" => e.epochs.to_string(),
            "embeddings.lr" => e.initial_lr.to_string(),
            "embeddings.min_count" => e.min_count.to_string(),
            "embeddings.subsample" => e.subsample_t.map_or_else(|| "off".into(), |t| t.to_string()),
            "lda.k" => self.lda.k.to_string(),
            "lda.alpha" => self.lda.alpha.to_string(),
            "lda.beta" => self.lda.beta.to_string(),
            "lda.iterations" => self.lda.iterations.to_string(),
            "grid.k" => join(&self.grid.ks),
            "grid.alpha" => join(&self.grid.alphas),
            "grid.beta" => join(&self.grid.betas),
            "grid.iterations" => self.grid.iterations.to_string(),
            "grid.fold_in_iterations" => self.grid.fold_in_iterations.to_string(),
            "grid.split" => self.grid.split_fraction.to_string(),
            "report.keywords" => self.report_keywords.to_string(),
            "mapping.subject_threshold" => self.mapping.subject_threshold.to_string(),
            "mapping.top_n" => self.mapping.top_n.to_string(),
            "mapping.min_score" => self.mapping.min_score.to_string(),
            "mapping.subject_narrowing" => self.mapping.subject_narrowing.to_string(),
            "eval.top_k" => self.eval_top_k.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines; `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail("expected `key = value`".into()))?;
            self.set(key.trim(), value).map_err(|e| match e {
                Error::Validation(m) => fail(m),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text, path)
    }

    /// The resolved configuration in the file format; parsing it back yields `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for key in Self::KEYS {
            let _ = writeln!(s, "{key} = {}", self.get(key).expect("listed key"));
        }
        s
    }

    /// Training settings with the run seed.
    pub fn training(&self) -> TrainingConfig {
        TrainingConfig {
            seed: self.seed,
            ..self.embeddings.clone()
        }
    }

    pub fn lda_params(&self) -> LdaParams {
        LdaParams {
            seed: self.seed,
            ..self.lda
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            seed: self.seed,
            ..self.grid.clone()
        }
    }
}

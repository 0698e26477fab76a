use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bow::BowCorpus;
use super::lda::{fit_lda, LdaParams};
use super::metrics::{log_likelihood, perplexity, DEFAULT_FOLD_IN_ITERATIONS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub iterations: usize,
    pub fold_in_iterations: usize,
    /// Fraction of documents held out for validation.
    pub split_fraction: f64,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            ks: vec![5, 10, 20, 30],
            alphas: vec![0.1],
            betas: vec![0.01],
            iterations: 500,
            fold_in_iterations: DEFAULT_FOLD_IN_ITERATIONS,
            split_fraction: 0.1,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub train_log_likelihood: f64,
    pub perplexity: f64,
}

/// Grid rows sorted by held-out perplexity; `rows[best]` is the winner.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    pub best: usize,
    pub train_docs: usize,
    pub validation_docs: usize,
}

impl GridResult {
    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best]
    }

    pub fn row_for(&self, k: usize, alpha: f64, beta: f64) -> Option<&GridRow> {
        self.rows.iter().find(|r| r.k == k && r.alpha == alpha && r.beta == beta)
    }

    /// CSV with header `K,alpha,beta,loglik,perplexity`, best row first.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["K", "alpha", "beta", "loglik", "perplexity"])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.alpha.to_string(),
                r.beta.to_string(),
                format!("{:.6}", r.train_log_likelihood),
                format!("{:.6}", r.perplexity),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<grid csv>", e))?;
        Ok(())
    }
}

/// One deterministic train/validation split, one fit per grid cell, cells
/// ranked by validation perplexity (ties: smaller K). Cells run in parallel.
pub fn grid_search(corpus: &BowCorpus, spec: &GridSpec) -> Result<GridResult> {
    if spec.ks.is_empty() || spec.alphas.is_empty() || spec.betas.is_empty() {
        return Err(Error::invalid("every grid axis needs at least one value"));
    }
    if !(spec.split_fraction > 0.0 && spec.split_fraction < 1.0) {
        return Err(Error::invalid("split fraction must lie in (0, 1)"));
    }
    if corpus.len() < 2 {
        return Err(Error::invalid("grid search needs at least two documents"));
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let n_val = ((corpus.len() as f64 * spec.split_fraction).ceil() as usize).clamp(1, corpus.len() - 1);
    let (val_idx, train_idx) = order.split_at(n_val);
    let mut train_idx = train_idx.to_vec();
    let mut val_idx = val_idx.to_vec();
    train_idx.sort_unstable();
    val_idx.sort_unstable();
    let train = corpus.subset(&train_idx);
    let validation = corpus.subset(&val_idx);

    let cells: Vec<LdaParams> = spec
        .ks
        .iter()
        .flat_map(|&k| {
            spec.alphas.iter().flat_map(move |&alpha| {
                spec.betas.iter().map(move |&beta| LdaParams {
                    k,
                    alpha,
                    beta,
                    iterations: spec.iterations,
                    seed: spec.seed,
                })
            })
        })
        .collect();

    let mut rows = cells
        .par_iter()
        .map(|&params| {
            let model = fit_lda(&train, params)?;
            let held = perplexity(&model, &validation, spec.fold_in_iterations, spec.seed)?;
            Ok(GridRow {
                k: params.k,
                alpha: params.alpha,
                beta: params.beta,
                train_log_likelihood: log_likelihood(&model, &train),
                perplexity: held.perplexity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.perplexity.total_cmp(&b.perplexity).then(a.k.cmp(&b.k)));
    Ok(GridResult {
        rows,
        best: 0,
        train_docs: train.len(),
        validation_docs: validation.len(),
    })
}

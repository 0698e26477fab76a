use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bow::BowCorpus;
use super::lda::LdaModel;
use crate::error::{Error, Result};

pub const DEFAULT_FOLD_IN_ITERATIONS: usize = 50;

/// Gibbs fold-in of one document with the topic-word distributions frozen.
/// Returns the θ point estimate `(N_dk + α) / (len + Kα)`.
pub fn fold_in(model: &LdaModel, tokens: &[usize], iterations: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = model.num_topics();
    let alpha = model.params().alpha;
    let phi: Vec<Vec<f64>> = tokens
        .iter()
        .map(|&w| (0..k).map(|t| model.phi(t, w)).collect())
        .collect();
    let mut n_k = vec![0u32; k];
    let mut z: Vec<usize> = tokens
        .iter()
        .map(|_| {
            let t = rng.gen_range(0..k);
            n_k[t] += 1;
            t
        })
        .collect();
    let mut cumulative = vec![0.0; k];
    for _ in 0..iterations {
        for (i, p) in phi.iter().enumerate() {
            n_k[z[i]] -= 1;
            let mut total = 0.0;
            for t in 0..k {
                total += (n_k[t] as f64 + alpha) * p[t];
                cumulative[t] = total;
            }
            let u = rng.gen::<f64>() * total;
            let new = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
            z[i] = new;
            n_k[new] += 1;
        }
    }
    let denom = tokens.len() as f64 + k as f64 * alpha;
    n_k.iter().map(|&c| (c as f64 + alpha) / denom).collect()
}

/// Maps a corpus's word ids onto the model vocabulary, dropping unknown words.
fn model_tokens(model: &LdaModel, corpus: &BowCorpus) -> Vec<Vec<usize>> {
    let same = corpus.vocabulary() == model.vocabulary();
    let lookup: std::collections::HashMap<&str, usize> = if same {
        Default::default()
    } else {
        model.vocabulary().iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect()
    };
    (0..corpus.len())
        .map(|d| {
            let doc = corpus.expand(d);
            if same {
                doc
            } else {
                doc.into_iter()
                    .filter_map(|w| lookup.get(corpus.vocabulary()[w].as_str()).copied())
                    .collect()
            }
        })
        .collect()
}

fn doc_log_likelihood(model: &LdaModel, tokens: &[usize], theta: &[f64]) -> f64 {
    tokens
        .iter()
        .map(|&w| {
            let p: f64 = theta.iter().enumerate().map(|(k, th)| th * model.phi(k, w)).sum();
            p.ln()
        })
        .sum()
}

/// `Σ_d Σ_tokens log Σ_k θ_dk φ_kw`.
///
/// When `corpus` holds exactly the training documents the fitted θ is used;
/// any other corpus is folded in first ([`DEFAULT_FOLD_IN_ITERATIONS`] sweeps,
/// seeded with the model seed).
pub fn log_likelihood(model: &LdaModel, corpus: &BowCorpus) -> f64 {
    let docs = model_tokens(model, corpus);
    let is_training = docs.len() == model.num_docs()
        && docs.iter().enumerate().all(|(d, t)| t.as_slice() == model.doc_tokens(d));
    if is_training {
        return docs
            .iter()
            .enumerate()
            .map(|(d, t)| doc_log_likelihood(model, t, &model.theta_row(d)))
            .sum();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.params().seed);
    docs.iter()
        .filter(|t| !t.is_empty())
        .map(|t| {
            let theta = fold_in(model, t, DEFAULT_FOLD_IN_ITERATIONS, &mut rng);
            doc_log_likelihood(model, t, &theta)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerplexityResult {
    pub perplexity: f64,
    pub log_likelihood: f64,
    pub eval_tokens: usize,
    /// Documents with no in-vocabulary token.
    pub skipped_docs: usize,
}

/// Held-out perplexity by document completion: even-position tokens of each
/// document estimate θ by fold-in, odd-position tokens are scored.
pub fn perplexity(model: &LdaModel, heldout: &BowCorpus, fold_in_iterations: usize, seed: u64) -> Result<PerplexityResult> {
    if heldout.is_empty() {
        return Err(Error::invalid("held-out corpus is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ll = 0.0;
    let mut eval_tokens = 0;
    let mut skipped = 0;
    for tokens in model_tokens(model, heldout) {
        if tokens.is_empty() {
            skipped += 1;
            continue;
        }
        let estimate: Vec<usize> = tokens.iter().step_by(2).copied().collect();
        let evaluate: Vec<usize> = tokens.iter().skip(1).step_by(2).copied().collect();
        if evaluate.is_empty() {
            continue;
        }
        let theta = fold_in(model, &estimate, fold_in_iterations, &mut rng);
        ll += doc_log_likelihood(model, &evaluate, &theta);
        eval_tokens += evaluate.len();
    }
    if eval_tokens == 0 {
        return Err(Error::invalid("held-out corpus has no token to evaluate"));
    }
    Ok(PerplexityResult {
        perplexity: (-ll / eval_tokens as f64).exp(),
        log_likelihood: ll,
        eval_tokens,
        skipped_docs: skipped,
    })
}

/// Topic mixture of a new document; see [`infer_doc_topics_with`].
pub fn infer_doc_topics<S: AsRef<str>>(model: &LdaModel, doc: &[S]) -> Result<Vec<f64>> {
    infer_doc_topics_with(model, doc, DEFAULT_FOLD_IN_ITERATIONS, model.params().seed)
}

pub fn infer_doc_topics_with<S: AsRef<str>>(model: &LdaModel, doc: &[S], iterations: usize, seed: u64) -> Result<Vec<f64>> {
    let lookup: std::collections::HashMap<&str, usize> =
        model.vocabulary().iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let tokens: Vec<usize> = doc.iter().filter_map(|t| lookup.get(t.as_ref()).copied()).collect();
    if tokens.is_empty() {
        return Err(Error::InferenceUndefined);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(fold_in(model, &tokens, iterations, &mut rng))
}

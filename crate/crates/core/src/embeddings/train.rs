//! SGD training with negative sampling for both word2vec architectures.
//!
//! Per training pair the loss is
//!
//! ```text
//! -log σ(u_o · h) - Σ_k log σ(-u_k · h)
//! ```
//!
//! where `u` are output-matrix rows, `o` the predicted word and `k` the sampled
//! negatives. Skip-gram uses the centre word's input row as `h` and predicts
//! each context word; CBOW uses the mean of the context input rows and
//! predicts the centre.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::EmbeddingModel;
use super::similarity::dot;
use super::vocab::{build_vocabulary, Vocabulary};
use crate::error::{Error, Result};

const NEGATIVE_TABLE_SIZE: usize = 1_000_000;
const UNIGRAM_POWER: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Cbow,
    SkipGram,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Cbow => "cbow",
            Architecture::SkipGram => "skipgram",
        }
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cbow" => Ok(Architecture::Cbow),
            "skipgram" | "skip-gram" | "sg" => Ok(Architecture::SkipGram),
            other => Err(format!("unknown architecture `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub architecture: Architecture,
    pub dim: usize,
    /// Maximum context offset; the effective window per centre is drawn
    /// uniformly from `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: u64,
    pub subsample_t: Option<f64>,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            architecture: Architecture::SkipGram,
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 5,
            subsample_t: None,
            seed: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::invalid("dim, window and negatives must all be >= 1"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::invalid("initial_lr must be positive"));
        }
        if self.min_count == 0 {
            return Err(Error::invalid("min_count must be >= 1"));
        }
        if let Some(t) = self.subsample_t {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::invalid("subsample threshold must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingStats {
    /// Mean per-pair loss of every epoch.
    pub epoch_losses: Vec<f64>,
    pub pairs: u64,
}

/// Trains a model; see [`train_with_stats`].
pub fn train(docs: &[Vec<String>], config: &TrainingConfig) -> Result<EmbeddingModel> {
    train_with_stats(docs, config).map(|(m, _)| m)
}

/// Trains a model on one token list per document. Single-threaded and fully
/// determined by `config.seed`.
pub fn train_with_stats(
    docs: &[Vec<String>],
    config: &TrainingConfig,
) -> Result<(EmbeddingModel, TrainingStats)> {
    config.validate()?;
    let vocab = build_vocabulary(docs.iter().flatten().map(String::as_str), config.min_count)?;
    let sentences: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.iter().filter_map(|w| vocab.index_of(w)).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = config.dim;
    let v = vocab.len();
    let bound = 0.5 / dim as f64;
    let mut input: Vec<f64> = (0..v * dim).map(|_| rng.gen_range(-bound..bound)).collect();
    let mut output = vec![0.0; v * dim];

    let table = negative_table(&vocab);
    let keep = config.subsample_t.map(|t| keep_probabilities(&vocab, t));
    let positions: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    let total = (positions * config.epochs as u64).max(1);

    let mut scratch = Scratch::new(dim, config.negatives + 1);
    let mut stats = TrainingStats::default();
    let mut processed = 0u64;
    let mut context = Vec::with_capacity(2 * config.window);
    let mut targets = Vec::with_capacity(config.negatives + 1);
    let mut kept = Vec::new();

    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0u64;
        for sentence in &sentences {
            kept.clear();
            match &keep {
                Some(p) => kept.extend(sentence.iter().copied().filter(|&w| rng.gen::<f64>() < p[w])),
                None => kept.extend_from_slice(sentence),
            }
            processed += (sentence.len() - kept.len()) as u64;
            for pos in 0..kept.len() {
                let lr = config.initial_lr * (1.0 - 0.9 * processed as f64 / total as f64);
                processed += 1;
                let b = rng.gen_range(1..=config.window);
                context.clear();
                let lo = pos.saturating_sub(b);
                let hi = (pos + b).min(kept.len() - 1);
                context.extend((lo..=hi).filter(|&j| j != pos).map(|j| kept[j]));
                if context.is_empty() {
                    continue;
                }
                let centre = kept[pos];
                let mut step = |inputs: &[usize], predicted: usize, rng: &mut ChaCha8Rng| -> Result<()> {
                    targets.clear();
                    targets.push((predicted, true));
                    for _ in 0..config.negatives {
                        let neg = table[rng.gen_range(0..table.len())];
                        if neg != predicted {
                            targets.push((neg, false));
                        }
                    }
                    let loss = forward_backward(&input, &output, dim, inputs, &targets, &mut scratch);
                    if !loss.is_finite() {
                        return Err(Error::TrainingDiverged {
                            epoch,
                            pair: stats.pairs,
                        });
                    }
                    apply(&mut input, &mut output, dim, inputs, &targets, &scratch, lr);
                    epoch_loss += loss;
                    epoch_pairs += 1;
                    stats.pairs += 1;
                    Ok(())
                };
                match config.architecture {
                    Architecture::SkipGram => {
                        for &o in &context {
                            step(&[centre], o, &mut rng)?;
                        }
                    }
                    Architecture::Cbow => step(&context, centre, &mut rng)?,
                }
            }
        }
        stats
            .epoch_losses
            .push(if epoch_pairs == 0 { 0.0 } else { epoch_loss / epoch_pairs as f64 });
    }

    if input.iter().chain(&output).any(|x| !x.is_finite()) {
        return Err(Error::TrainingDiverged {
            epoch: config.epochs.saturating_sub(1),
            pair: stats.pairs,
        });
    }
    let model = EmbeddingModel::from_parts(vocab, dim, input, output, config.clone())?;
    Ok((model, stats))
}

/// Unigram^0.75 sampling table.
fn negative_table(vocab: &Vocabulary) -> Vec<usize> {
    let weights: Vec<f64> = vocab
        .counts()
        .iter()
        .map(|&c| (c as f64).powf(UNIGRAM_POWER))
        .collect();
    let total: f64 = weights.iter().sum();
    let size = NEGATIVE_TABLE_SIZE;
    let mut table = Vec::with_capacity(size);
    let mut word = 0;
    let mut cumulative = weights[0] / total;
    for i in 0..size {
        table.push(word);
        if (i + 1) as f64 / size as f64 > cumulative && word + 1 < weights.len() {
            word += 1;
            cumulative += weights[word] / total;
        }
    }
    table
}

fn keep_probabilities(vocab: &Vocabulary, t: f64) -> Vec<f64> {
    let total = vocab.total_count() as f64;
    vocab
        .counts()
        .iter()
        .map(|&c| {
            let f = c as f64 / total;
            ((f / t).sqrt() + 1.0) * t / f
        })
        .collect()
}

/// `log σ(x)` without overflow.
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Buffers for one pair's forward/backward pass.
pub(crate) struct Scratch {
    pub h: Vec<f64>,
    /// dLoss/dh.
    pub grad_h: Vec<f64>,
    /// dLoss/du_t for each target, `targets × dim`.
    pub grad_out: Vec<f64>,
}

impl Scratch {
    pub fn new(dim: usize, targets: usize) -> Self {
        Scratch {
            h: vec![0.0; dim],
            grad_h: vec![0.0; dim],
            grad_out: vec![0.0; dim * targets],
        }
    }
}

/// Computes the negative-sampling loss for one pair and fills the gradients
/// in `scratch`. `h` is the mean of the `inputs` rows; `targets` pairs an
/// output row with its label (true = observed word).
pub(crate) fn forward_backward(
    input: &[f64],
    output: &[f64],
    dim: usize,
    inputs: &[usize],
    targets: &[(usize, bool)],
    scratch: &mut Scratch,
) -> f64 {
    let scale = 1.0 / inputs.len() as f64;
    scratch.h.iter_mut().for_each(|x| *x = 0.0);
    for &i in inputs {
        for (h, x) in scratch.h.iter_mut().zip(&input[i * dim..(i + 1) * dim]) {
            *h += x;
        }
    }
    scratch.h.iter_mut().for_each(|x| *x *= scale);
    scratch.grad_h.iter_mut().for_each(|x| *x = 0.0);
    if scratch.grad_out.len() < targets.len() * dim {
        scratch.grad_out.resize(targets.len() * dim, 0.0);
    }

    let mut loss = 0.0;
    for (j, &(t, positive)) in targets.iter().enumerate() {
        let u = &output[t * dim..(t + 1) * dim];
        let s = dot(u, &scratch.h);
        // d/ds of -log σ(s) is σ(s) - 1; of -log σ(-s) it is σ(s)
        let g = if positive {
            loss -= log_sigmoid(s);
            sigmoid(s) - 1.0
        } else {
            loss -= log_sigmoid(-s);
            sigmoid(s)
        };
        let gu = &mut scratch.grad_out[j * dim..(j + 1) * dim];
        for ((gu, h), (gh, u)) in gu.iter_mut().zip(&scratch.h).zip(scratch.grad_h.iter_mut().zip(u)) {
            *gu = g * h;
            *gh += g * u;
        }
    }
    loss
}

/// Gradient step; each input row receives `grad_h / inputs.len()`.
fn apply(
    input: &mut [f64],
    output: &mut [f64],
    dim: usize,
    inputs: &[usize],
    targets: &[(usize, bool)],
    scratch: &Scratch,
    lr: f64,
) {
    for (j, &(t, _)) in targets.iter().enumerate() {
        let g = &scratch.grad_out[j * dim..(j + 1) * dim];
        for (u, g) in output[t * dim..(t + 1) * dim].iter_mut().zip(g) {
            *u -= lr * g;
        }
    }
    let step = lr / inputs.len() as f64;
    for &i in inputs {
        for (x, g) in input[i * dim..(i + 1) * dim].iter_mut().zip(&scratch.grad_h) {
            *x -= step * g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::cosine_similarity;

    fn repeated(text: &str, n: usize) -> Vec<Vec<String>> {
        let doc: Vec<String> = text.split(' ').map(str::to_string).collect();
        vec![doc; n]
    }

    fn tiny_config(arch: Architecture) -> TrainingConfig {
        TrainingConfig {
            architecture: arch,
            dim: 8,
            window: 1,
            negatives: 5,
            epochs: 10,
            initial_lr: 0.025,
            min_count: 1,
            subsample_t: None,
            seed: 3,
        }
    }

    #[test]
    fn alpha_beta_pair_is_learned() {
        let docs = repeated("alpha beta", 200);
        let (model, stats) = train_with_stats(&docs, &tiny_config(Architecture::SkipGram)).unwrap();
        assert_eq!(stats.epoch_losses.len(), 10);
        assert!(stats.epoch_losses[9] < stats.epoch_losses[0], "{:?}", stats.epoch_losses);

        // output-vs-input score of the observed pair, before and after
        let a = model.vocabulary().index_of("alpha").unwrap();
        let b = model.vocabulary().index_of("beta").unwrap();
        let trained = dot(model.output_row(b), model.input_row(a));
        assert!(trained > 0.0, "score {trained}");
        let mut short = tiny_config(Architecture::SkipGram);
        short.epochs = 1;
        let early = train(&docs, &short).unwrap();
        let early_score = dot(early.output_row(b), early.input_row(a));
        assert!(trained > early_score);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let docs = repeated("the parcel arrived late and the box was damaged", 50);
        for arch in [Architecture::SkipGram, Architecture::Cbow] {
            let a = train(&docs, &tiny_config(arch)).unwrap();
            let b = train(&docs, &tiny_config(arch)).unwrap();
            assert_eq!(a.input_matrix(), b.input_matrix());
            let mut other = tiny_config(arch);
            other.seed = 4;
            let c = train(&docs, &other).unwrap();
            assert_ne!(a.input_matrix(), c.input_matrix());
        }
    }

    #[test]
    fn cbow_loss_decreases() {
        let docs = repeated("refund my order now please", 100);
        let (_, stats) = train_with_stats(&docs, &tiny_config(Architecture::Cbow)).unwrap();
        assert!(stats.epoch_losses.last().unwrap() < &stats.epoch_losses[0]);
    }

    #[test]
    fn subsampling_runs_deterministically() {
        let docs = repeated("a a a a b c a a d", 30);
        let mut cfg = tiny_config(Architecture::SkipGram);
        cfg.subsample_t = Some(1e-2);
        let a = train(&docs, &cfg).unwrap();
        let b = train(&docs, &cfg).unwrap();
        assert_eq!(a.input_matrix(), b.input_matrix());
    }

    #[test]
    fn huge_learning_rate_diverges_or_stays_finite() {
        let docs = repeated("x y z", 50);
        let mut cfg = tiny_config(Architecture::SkipGram);
        cfg.initial_lr = 1e300;
        match train(&docs, &cfg) {
            Err(Error::TrainingDiverged { .. }) => {}
            Ok(m) => assert!(m.input_matrix().iter().all(|x| x.is_finite())),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn invalid_configs() {
        let docs = repeated("a b", 2);
        let mut cfg = tiny_config(Architecture::Cbow);
        cfg.dim = 0;
        assert!(train(&docs, &cfg).is_err());
        let mut cfg = tiny_config(Architecture::Cbow);
        cfg.min_count = 10;
        assert!(matches!(train(&docs, &cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn negative_table_follows_smoothed_unigram() {
        let vocab = Vocabulary::from_counts(vec![("a".into(), 16), ("b".into(), 1)], 1).unwrap();
        let table = negative_table(&vocab);
        let share_a = table.iter().filter(|&&w| w == 0).count() as f64 / table.len() as f64;
        let expected = 16f64.powf(0.75) / (16f64.powf(0.75) + 1.0);
        assert!((share_a - expected).abs() < 1e-5, "{share_a} vs {expected}");
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!((log_sigmoid(0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!(log_sigmoid(800.0).abs() < 1e-300);
        assert!((log_sigmoid(-800.0) + 800.0).abs() < 1e-9);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn similar_contexts_give_similar_vectors() {
        let mut docs = repeated("red apple sweet", 100);
        docs.extend(repeated("green apple sweet", 100));
        docs.extend(repeated("fast car loud", 100));
        let mut cfg = tiny_config(Architecture::SkipGram);
        cfg.dim = 16;
        cfg.epochs = 20;
        let m = train(&docs, &cfg).unwrap();
        let rg = cosine_similarity(m.word_vector("red").unwrap(), m.word_vector("green").unwrap()).unwrap();
        let rf = cosine_similarity(m.word_vector("red").unwrap(), m.word_vector("fast").unwrap()).unwrap();
        assert!(rg > rf, "{rg} vs {rf}");
    }
}

//! Finite-difference check of the negative-sampling gradients.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::train::{forward_backward, Architecture, Scratch, TrainingConfig};
use super::vocab::build_vocabulary;
use crate::error::{Error, Result};

/// Gradients smaller than this are compared in absolute terms.
const RELATIVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    /// max |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
    pub max_relative_error: f64,
    pub max_absolute_error: f64,
    pub parameters_checked: usize,
}

/// Where a touched parameter lives.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Param {
    Input(usize, usize),
    Output(usize, usize),
}

/// Compares the analytic gradient of one (inputs, predicted word, negatives)
/// pair with central differences of step `epsilon`.
///
/// The pair is drawn from `corpus` with `config.seed`; both weight matrices
/// are initialized uniformly in (-0.5, 0.5) so no gradient vanishes by
/// construction. Desk scale only: `dim <= 16` and at most 20 distinct words.
pub fn gradient_check(config: &TrainingConfig, corpus: &[Vec<String>], epsilon: f64) -> Result<GradientCheck> {
    config.validate()?;
    let vocab = build_vocabulary(corpus.iter().flatten().map(String::as_str), 1)?;
    if config.dim > 16 || vocab.len() > 20 {
        return Err(Error::invalid("gradient check is limited to dim <= 16 and 20 words"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = config.dim;
    let v = vocab.len();
    let input: Vec<f64> = (0..v * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let output: Vec<f64> = (0..v * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let (inputs, predicted) = sample_pair(config, corpus, &vocab, &mut rng)?;
    let mut targets = vec![(predicted, true)];
    for _ in 0..config.negatives {
        let mut k = rng.gen_range(0..v);
        while k == predicted && v > 1 {
            k = rng.gen_range(0..v);
        }
        targets.push((k, false));
    }
    Ok(check_pair(&input, &output, dim, &inputs, &targets, epsilon))
}

fn sample_pair(
    config: &TrainingConfig,
    corpus: &[Vec<String>],
    vocab: &super::vocab::Vocabulary,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, usize)> {
    let usable: Vec<Vec<usize>> = corpus
        .iter()
        .map(|d| d.iter().filter_map(|w| vocab.index_of(w)).collect::<Vec<_>>())
        .filter(|d| d.len() >= 2)
        .collect();
    let doc = usable
        .choose(rng)
        .ok_or_else(|| Error::invalid("corpus needs a document with two tokens"))?;
    let pos = rng.gen_range(0..doc.len());
    let lo = pos.saturating_sub(config.window);
    let hi = (pos + config.window).min(doc.len() - 1);
    let context: Vec<usize> = (lo..=hi).filter(|&j| j != pos).map(|j| doc[j]).collect();
    Ok(match config.architecture {
        Architecture::SkipGram => (vec![doc[pos]], *context.choose(rng).unwrap()),
        Architecture::Cbow => (context, doc[pos]),
    })
}

pub(crate) fn check_pair(
    input: &[f64],
    output: &[f64],
    dim: usize,
    inputs: &[usize],
    targets: &[(usize, bool)],
    epsilon: f64,
) -> GradientCheck {
    let mut scratch = Scratch::new(dim, targets.len());
    forward_backward(input, output, dim, inputs, targets, &mut scratch);

    // accumulate analytic gradients per parameter; rows may repeat
    let mut analytic: std::collections::BTreeMap<Param, f64> = Default::default();
    for &i in inputs {
        for d in 0..dim {
            *analytic.entry(Param::Input(i, d)).or_default() += scratch.grad_h[d] / inputs.len() as f64;
        }
    }
    for (j, &(t, _)) in targets.iter().enumerate() {
        for d in 0..dim {
            *analytic.entry(Param::Output(t, d)).or_default() += scratch.grad_out[j * dim + d];
        }
    }

    let mut win = input.to_vec();
    let mut wout = output.to_vec();
    let mut loss_at = |p: Param, delta: f64, win: &mut Vec<f64>, wout: &mut Vec<f64>| -> f64 {
        let slot = match p {
            Param::Input(r, d) => &mut win[r * dim + d],
            Param::Output(r, d) => &mut wout[r * dim + d],
        };
        let saved = *slot;
        *slot = saved + delta;
        let loss = forward_backward(win, wout, dim, inputs, targets, &mut scratch);
        let slot = match p {
            Param::Input(r, d) => &mut win[r * dim + d],
            Param::Output(r, d) => &mut wout[r * dim + d],
        };
        *slot = saved;
        loss
    };

    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (&p, &a) in &analytic {
        let numeric = (loss_at(p, epsilon, &mut win, &mut wout) - loss_at(p, -epsilon, &mut win, &mut wout))
            / (2.0 * epsilon);
        let abs = (a - numeric).abs();
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(abs / a.abs().max(numeric.abs()).max(RELATIVE_FLOOR));
    }
    GradientCheck {
        max_relative_error: max_rel,
        max_absolute_error: max_abs,
        parameters_checked: analytic.len(),
    }
}

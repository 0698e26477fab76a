use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bow::BowCorpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams {
            k: 10,
            alpha: 0.1,
            beta: 0.01,
            iterations: 500,
            seed: 1,
        }
    }
}

impl LdaParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("K must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::invalid("alpha and beta must be positive"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        Ok(())
    }
}

/// Collapsed-Gibbs LDA state. The count tables are derived from the topic
/// assignments `z` and rebuilt on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    params: LdaParams,
    vocab: Vec<String>,
    /// Token word ids per training document.
    docs: Vec<Vec<usize>>,
    /// Topic of every training token.
    z: Vec<Vec<usize>>,
    sweeps: usize,
    #[serde(skip)]
    n_kw: Vec<u32>,
    #[serde(skip)]
    n_k: Vec<u32>,
    #[serde(skip)]
    n_dk: Vec<u32>,
}

impl LdaModel {
    fn from_assignments(
        params: LdaParams,
        vocab: Vec<String>,
        docs: Vec<Vec<usize>>,
        z: Vec<Vec<usize>>,
        sweeps: usize,
    ) -> Result<Self> {
        let mut m = LdaModel {
            params,
            vocab,
            docs,
            z,
            sweeps,
            n_kw: Vec::new(),
            n_k: Vec::new(),
            n_dk: Vec::new(),
        };
        m.rebuild_counts()?;
        Ok(m)
    }

    fn rebuild_counts(&mut self) -> Result<()> {
        let (k, v) = (self.params.k, self.vocab.len());
        self.n_kw = vec![0; k * v];
        self.n_k = vec![0; k];
        self.n_dk = vec![0; self.docs.len() * k];
        if self.z.len() != self.docs.len() {
            return Err(Error::invalid("assignment count does not match documents"));
        }
        for (d, (doc, zs)) in self.docs.iter().zip(&self.z).enumerate() {
            if doc.len() != zs.len() {
                return Err(Error::invalid("assignment length does not match document"));
            }
            for (&w, &t) in doc.iter().zip(zs) {
                if w >= v || t >= k {
                    return Err(Error::invalid("word or topic index out of range"));
                }
                self.n_kw[t * v + w] += 1;
                self.n_k[t] += 1;
                self.n_dk[d * k + t] += 1;
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &LdaParams {
        &self.params
    }

    pub fn num_topics(&self) -> usize {
        self.params.k
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn doc_tokens(&self, d: usize) -> &[usize] {
        &self.docs[d]
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.z
    }

    pub fn topic_word_count(&self, k: usize, w: usize) -> u32 {
        self.n_kw[k * self.vocab.len() + w]
    }

    pub fn topic_total(&self, k: usize) -> u32 {
        self.n_k[k]
    }

    pub fn doc_topic_count(&self, d: usize, k: usize) -> u32 {
        self.n_dk[d * self.params.k + k]
    }

    /// φ_kw = (N_kw + β) / (N_k + Vβ)
    pub fn phi(&self, k: usize, w: usize) -> f64 {
        let v = self.vocab.len() as f64;
        (self.topic_word_count(k, w) as f64 + self.params.beta) / (self.n_k[k] as f64 + v * self.params.beta)
    }

    pub fn phi_row(&self, k: usize) -> Vec<f64> {
        (0..self.vocab.len()).map(|w| self.phi(k, w)).collect()
    }

    /// θ_dk = (N_dk + α) / (len_d + Kα)
    pub fn theta(&self, d: usize, k: usize) -> f64 {
        let kk = self.params.k as f64;
        (self.doc_topic_count(d, k) as f64 + self.params.alpha)
            / (self.docs[d].len() as f64 + kk * self.params.alpha)
    }

    pub fn theta_row(&self, d: usize) -> Vec<f64> {
        (0..self.params.k).map(|k| self.theta(d, k)).collect()
    }

    /// Recomputes every count table from `z` and compares with the stored ones.
    pub fn counts_consistent(&self) -> bool {
        let mut fresh = self.clone();
        fresh.rebuild_counts().is_ok()
            && fresh.n_kw == self.n_kw
            && fresh.n_k == self.n_k
            && fresh.n_dk == self.n_dk
    }

    /// Relabels topics: new topic `perm[k]` takes the role of old topic `k`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.params.k];
        if perm.len() != self.params.k || perm.iter().any(|&p| p >= self.params.k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("not a permutation of the topics"));
        }
        let z = self.z.iter().map(|zs| zs.iter().map(|&t| perm[t]).collect()).collect();
        Self::from_assignments(self.params, self.vocab.clone(), self.docs.clone(), z, self.sweeps)
    }

    #[cfg(test)]
    pub(crate) fn with_assignments(
        params: LdaParams,
        vocab: Vec<String>,
        docs: Vec<Vec<usize>>,
        z: Vec<Vec<usize>>,
    ) -> Result<Self> {
        Self::from_assignments(params, vocab, docs, z, 0)
    }
}

/// A running Gibbs chain; exposes single sweeps for inspection.
pub struct GibbsSampler {
    model: LdaModel,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Random initial assignments drawn from the seeded generator.
    pub fn new(corpus: &BowCorpus, params: LdaParams) -> Result<Self> {
        params.validate()?;
        if corpus.is_empty() {
            return Err(Error::invalid("cannot fit LDA on an empty corpus"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let docs: Vec<Vec<usize>> = (0..corpus.len()).map(|d| corpus.expand(d)).collect();
        let z = docs
            .iter()
            .map(|doc| doc.iter().map(|_| rng.gen_range(0..params.k)).collect())
            .collect();
        let model = LdaModel::from_assignments(params, corpus.vocabulary().to_vec(), docs, z, 0)?;
        Ok(GibbsSampler {
            model,
            rng,
            weights: vec![0.0; params.k],
        })
    }

    /// Resamples every token once.
    pub fn sweep(&mut self) {
        let m = &mut self.model;
        let k = m.params.k;
        let v = m.vocab.len();
        let (alpha, beta) = (m.params.alpha, m.params.beta);
        let vbeta = v as f64 * beta;
        for d in 0..m.docs.len() {
            for i in 0..m.docs[d].len() {
                let w = m.docs[d][i];
                let old = m.z[d][i];
                m.n_kw[old * v + w] -= 1;
                m.n_k[old] -= 1;
                m.n_dk[d * k + old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (m.n_dk[d * k + t] as f64 + alpha) * (m.n_kw[t * v + w] as f64 + beta)
                        / (m.n_k[t] as f64 + vbeta);
                    self.weights[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                m.z[d][i] = new;
                m.n_kw[new * v + w] += 1;
                m.n_k[new] += 1;
                m.n_dk[d * k + new] += 1;
            }
        }
        m.sweeps += 1;
    }

    pub fn model(&self) -> &LdaModel {
        &self.model
    }

    pub fn into_model(self) -> LdaModel {
        self.model
    }
}

/// Fits LDA with `params.iterations` Gibbs sweeps.
pub fn fit_lda(corpus: &BowCorpus, params: LdaParams) -> Result<LdaModel> {
    let mut sampler = GibbsSampler::new(corpus, params)?;
    for _ in 0..params.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

pub fn save_lda(model: &LdaModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer(std::io::BufWriter::new(file), model)?;
    Ok(())
}

pub fn load_lda(path: impl AsRef<Path>) -> Result<LdaModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut model: LdaModel = serde_json::from_str(&text)?;
    model.params.validate()?;
    model.rebuild_counts()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::top_keywords;

    fn docs(texts: &[&str]) -> BowCorpus {
        let toks: Vec<Vec<&str>> = texts.iter().map(|t| t.split(' ').collect()).collect();
        BowCorpus::from_token_docs(&toks)
    }

    fn params(k: usize, iterations: usize, seed: u64) -> LdaParams {
        LdaParams {
            k,
            alpha: 0.1,
            beta: 0.01,
            iterations,
            seed,
        }
    }

    #[test]
    fn single_topic_is_smoothed_unigram() {
        let c = docs(&["a a b", "c a"]);
        let m = fit_lda(&c, params(1, 5, 3)).unwrap();
        assert!(m.assignments().iter().flatten().all(|&t| t == 0));
        let v = 3.0;
        let expected = [(3.0 + 0.01) / (5.0 + v * 0.01), (1.0 + 0.01) / (5.0 + v * 0.01)];
        assert!((m.phi(0, 0) - expected[0]).abs() < 1e-15);
        assert!((m.phi(0, 1) - expected[1]).abs() < 1e-15);
    }

    #[test]
    fn two_disjoint_topics_separate() {
        let c = docs(&["a a b", "b a a", "x y x", "y x x"]);
        let m = fit_lda(&c, params(2, 200, 42)).unwrap();
        let mut sets: Vec<Vec<String>> = (0..2)
            .map(|k| {
                let mut s: Vec<String> = top_keywords(&m, k, 2).unwrap().into_iter().map(|(w, _)| w).collect();
                s.sort();
                s
            })
            .collect();
        sets.sort();
        assert_eq!(sets, vec![vec!["a", "b"], vec!["x", "y"]]);
    }

    #[test]
    fn counts_stay_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let texts: Vec<Vec<String>> = (0..30)
            .map(|_| (0..rng.gen_range(0..12)).map(|_| format!("w{}", rng.gen_range(0..25))).collect())
            .collect();
        let c = BowCorpus::from_token_docs(&texts);
        let mut s = GibbsSampler::new(&c, params(4, 100, 1)).unwrap();
        for sweep in 1..=100 {
            s.sweep();
            if [1, 10, 100].contains(&sweep) {
                let m = s.model();
                assert!(m.counts_consistent());
                for d in 0..m.num_docs() {
                    let total: u32 = (0..4).map(|k| m.doc_topic_count(d, k)).sum();
                    assert_eq!(total as usize, m.doc_tokens(d).len());
                }
                for k in 0..4 {
                    let total: u32 = (0..m.vocabulary().len()).map(|w| m.topic_word_count(k, w)).sum();
                    assert_eq!(total, m.topic_total(k));
                }
            }
        }
    }

    #[test]
    fn distributions_are_normalized() {
        let c = docs(&["a b c a", "d e", "a e e e", "x"]);
        let m = fit_lda(&c, params(3, 20, 2)).unwrap();
        for k in 0..3 {
            assert!((m.phi_row(k).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for d in 0..4 {
            let row = m.theta_row(d);
            assert!(row.iter().all(|&x| x > 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_and_persistent() {
        let c = docs(&["a b c a", "d e", "a e e e"]);
        let a = fit_lda(&c, params(2, 30, 5)).unwrap();
        let b = fit_lda(&c, params(2, 30, 5)).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lda.json");
        save_lda(&a, &path).unwrap();
        let back = load_lda(&path).unwrap();
        assert_eq!(back, a);
        assert!(back.counts_consistent());
    }

    #[test]
    fn invalid_inputs() {
        let c = docs(&["a"]);
        assert!(fit_lda(&c, params(0, 1, 1)).is_err());
        assert!(fit_lda(&BowCorpus::from_token_docs::<&str>(&[]), params(2, 1, 1)).is_err());
        let mut p = params(2, 1, 1);
        p.alpha = 0.0;
        assert!(fit_lda(&c, p).is_err());
        // empty documents are fine
        let e = BowCorpus::from_token_docs(&[vec!["a"], vec![]]);
        assert!(fit_lda(&e, params(2, 3, 1)).is_ok());
    }

    #[test]
    fn permutation_is_checked() {
        let c = docs(&["a b", "b c"]);
        let m = fit_lda(&c, params(3, 5, 1)).unwrap();
        assert!(m.permuted(&[0, 0, 1]).is_err());
        let p = m.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.topic_total(2), m.topic_total(0));
    }
}

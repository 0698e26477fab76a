use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Bag-of-words documents over a shared vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BowCorpus {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    /// `(word index, count)` pairs sorted by word index, counts >= 1.
    docs: Vec<Vec<(usize, u32)>>,
}

impl BowCorpus {
    /// Builds the vocabulary (lexicographic order) from the documents themselves.
    pub fn from_token_docs<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        let words: BTreeSet<&str> = docs.iter().flatten().map(|t| t.as_ref()).collect();
        let vocab: Vec<String> = words.into_iter().map(str::to_string).collect();
        Self::with_vocabulary(docs, vocab)
    }

    /// Uses a fixed vocabulary; tokens outside it are dropped.
    pub fn with_vocabulary<S: AsRef<str>>(docs: &[Vec<S>], vocab: Vec<String>) -> Self {
        let index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let docs = docs
            .iter()
            .map(|d| {
                let mut counts: HashMap<usize, u32> = HashMap::new();
                for t in d {
                    if let Some(&i) = index.get(t.as_ref()) {
                        *counts.entry(i).or_default() += 1;
                    }
                }
                let mut v: Vec<(usize, u32)> = counts.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        BowCorpus { vocab, index, docs }
    }

    /// Builds directly from sparse documents.
    pub fn from_sparse(vocab: Vec<String>, docs: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        let index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        if index.len() != vocab.len() {
            return Err(Error::invalid("repeated vocabulary word"));
        }
        let mut docs = docs;
        for d in &mut docs {
            if d.iter().any(|&(w, c)| w >= vocab.len() || c == 0) {
                return Err(Error::invalid("word index out of range or zero count"));
            }
            d.sort_unstable();
            if d.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::invalid("repeated word index within a document"));
            }
        }
        Ok(BowCorpus { vocab, index, docs })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn docs(&self) -> &[Vec<(usize, u32)>] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().flatten().map(|&(_, c)| c as usize).sum()
    }

    /// Token sequence of document `d`, words repeated by count.
    pub fn expand(&self, d: usize) -> Vec<usize> {
        self.docs[d]
            .iter()
            .flat_map(|&(w, c)| std::iter::repeat_n(w, c as usize))
            .collect()
    }

    /// The documents at `indices`, same vocabulary.
    pub fn subset(&self, indices: &[usize]) -> Self {
        BowCorpus {
            vocab: self.vocab.clone(),
            index: self.index.clone(),
            docs: indices.iter().map(|&i| self.docs[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_vocabulary() {
        let c = BowCorpus::from_token_docs(&[vec!["b", "a", "b"], vec![], vec!["c"]]);
        assert_eq!(c.vocabulary(), ["a", "b", "c"]);
        assert_eq!(c.docs()[0], vec![(0, 1), (1, 2)]);
        assert!(c.docs()[1].is_empty());
        assert_eq!(c.num_tokens(), 4);
        assert_eq!(c.expand(0), vec![0, 1, 1]);
    }

    #[test]
    fn fixed_vocabulary_drops_oov() {
        let c = BowCorpus::with_vocabulary(&[vec!["a", "zz", "a"]], vec!["a".into()]);
        assert_eq!(c.docs()[0], vec![(0, 2)]);
    }

    #[test]
    fn sparse_validation() {
        assert!(BowCorpus::from_sparse(vec!["a".into()], vec![vec![(1, 1)]]).is_err());
        assert!(BowCorpus::from_sparse(vec!["a".into()], vec![vec![(0, 0)]]).is_err());
        assert!(BowCorpus::from_sparse(vec!["a".into(), "a".into()], vec![]).is_err());
        assert!(BowCorpus::from_sparse(vec!["a".into()], vec![vec![(0, 3)]]).is_ok());
    }
}

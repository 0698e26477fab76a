use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::similarity::{cosine_similarity, norm};
use super::train::{Architecture, TrainingConfig};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

const OUTPUT_SECTION: &str = "#output";
const VOCAB_SECTION: &str = "#vocab";
const CONFIG_SECTION: &str = "#config";

/// A trained word-vector store. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<f64>,
    output: Vec<f64>,
    config: TrainingConfig,
}

impl EmbeddingModel {
    pub(crate) fn from_parts(
        vocab: Vocabulary,
        dim: usize,
        input: Vec<f64>,
        output: Vec<f64>,
        config: TrainingConfig,
    ) -> Result<Self> {
        let expected = vocab.len() * dim;
        if dim == 0 || input.len() != expected || output.len() != expected {
            return Err(Error::invalid("matrix shape does not match vocabulary and dim"));
        }
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite weight"));
        }
        Ok(EmbeddingModel {
            vocab,
            dim,
            input,
            output,
            config,
        })
    }

    /// A model from explicit word vectors; the output matrix is zero.
    pub fn from_vectors<S: AsRef<str>>(entries: &[(S, Vec<f64>)]) -> Result<Self> {
        let dim = entries
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::invalid("no vectors"))?;
        if entries.iter().any(|(_, v)| v.len() != dim) {
            return Err(Error::invalid("vectors differ in dimension"));
        }
        // equal counts keep lexicographic order; remap rows accordingly
        let vocab = Vocabulary::from_counts(
            entries.iter().map(|(w, _)| (w.as_ref().to_string(), 1)).collect(),
            1,
        )?;
        let mut input = vec![0.0; vocab.len() * dim];
        for (w, v) in entries {
            let i = vocab.index_of(w.as_ref()).unwrap();
            input[i * dim..(i + 1) * dim].copy_from_slice(v);
        }
        let config = TrainingConfig {
            dim,
            min_count: 1,
            ..TrainingConfig::default()
        };
        Self::from_parts(vocab, dim, input, vec![0.0; entries.len() * dim], config)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn architecture(&self) -> Architecture {
        self.config.architecture
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn input_matrix(&self) -> &[f64] {
        &self.input
    }

    pub fn output_matrix(&self) -> &[f64] {
        &self.output
    }

    pub fn input_row(&self, index: usize) -> &[f64] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    pub fn output_row(&self, index: usize) -> &[f64] {
        &self.output[index * self.dim..(index + 1) * self.dim]
    }

    /// The learned input-matrix row of `word`.
    pub fn word_vector(&self, word: &str) -> Result<&[f64]> {
        self.vocab
            .index_of(word)
            .map(|i| self.input_row(i))
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))
    }

    /// The `k` words closest to `word` by cosine, query excluded, best first
    /// and lexicographic among equal scores. Zero vectors are skipped.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        let query = self.word_vector(word)?;
        if norm(query) == 0.0 {
            return Err(Error::UndefinedSimilarity);
        }
        let mut scored = Vec::with_capacity(self.vocab.len());
        for (i, w) in self.vocab.words().iter().enumerate() {
            if w == word {
                continue;
            }
            match cosine_similarity(query, self.input_row(i)) {
                Ok(s) => scored.push((w.clone(), s)),
                Err(Error::UndefinedSimilarity) => {}
                Err(e) => return Err(e),
            }
        }
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }

    /// Mean of the unit-normalized vectors of the in-vocabulary tokens.
    ///
    /// Out-of-vocabulary tokens and zero vectors are skipped; `None` when
    /// nothing is left. The mean is not re-normalized.
    pub fn sentence_embedding<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut m = 0usize;
        for t in tokens {
            let Some(i) = self.vocab.index_of(t.as_ref()) else { continue };
            let v = self.input_row(i);
            let n = norm(v);
            if n == 0.0 {
                continue;
            }
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x / n;
            }
            m += 1;
        }
        if m == 0 {
            return None;
        }
        sum.iter_mut().for_each(|s| *s /= m as f64);
        Some(sum)
    }

    /// Hex digest over words, dimension and input weights.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for w in self.vocab.words() {
            h.update(w.as_bytes());
            h.update([0]);
        }
        for x in &self.input {
            h.update(x.to_le_bytes());
        }
        let digest = h.finalize();
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Serializes to the text format read by [`load_model`].
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vocab.len(), self.dim)?;
        let mut line = String::new();
        let mut rows = |w: &mut W, matrix: &[f64]| -> std::io::Result<()> {
            for (i, word) in self.vocab.words().iter().enumerate() {
                line.clear();
                line.push_str(word);
                for x in &matrix[i * self.dim..(i + 1) * self.dim] {
                    // 9 significant digits
                    let _ = write!(line, " {x:.8e}");
                }
                writeln!(w, "{line}")?;
            }
            Ok(())
        };
        rows(&mut w, &self.input)?;
        writeln!(w, "{OUTPUT_SECTION}")?;
        rows(&mut w, &self.output)?;
        writeln!(w, "{VOCAB_SECTION}")?;
        for (word, c) in self.vocab.words().iter().zip(self.vocab.counts()) {
            writeln!(w, "{word} {c}")?;
        }
        writeln!(w, "{CONFIG_SECTION}")?;
        let c = &self.config;
        writeln!(w, "architecture {}", c.architecture)?;
        writeln!(w, "dim {}", c.dim)?;
        writeln!(w, "window {}", c.window)?;
        writeln!(w, "negatives {}", c.negatives)?;
        writeln!(w, "epochs {}", c.epochs)?;
        writeln!(w, "initial_lr {}", c.initial_lr)?;
        writeln!(w, "min_count {}", c.min_count)?;
        if let Some(t) = c.subsample_t {
            writeln!(w, "subsample_t {t}")?;
        }
        writeln!(w, "seed {}", c.seed)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    /// Parses the text format. Only the header and the input rows are
    /// required, so plain word2vec text files load too.
    pub fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut lines = Lines {
            inner: reader.lines(),
            path,
            line: 0,
        };
        let header = lines.expect()?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| lines.err(format!("bad header `{header}`")))?;
        let &[v, dim] = dims.as_slice() else {
            return Err(lines.err(format!("header must be `V dim`, got `{header}`")));
        };
        if v == 0 || dim == 0 {
            return Err(lines.err("empty vocabulary or zero dimension".into()));
        }

        let (words, input) = lines.rows(v, dim, None)?;
        let mut output = vec![0.0; v * dim];
        let mut counts: Vec<u64> = vec![1; v];
        let mut config = TrainingConfig {
            dim,
            min_count: 1,
            ..TrainingConfig::default()
        };

        while let Some(line) = lines.next()? {
            match line.trim() {
                "" => continue,
                OUTPUT_SECTION => output = lines.rows(v, dim, Some(&words))?.1,
                VOCAB_SECTION => {
                    for (r, word) in words.iter().enumerate() {
                        let l = lines.expect()?;
                        let (w, c) = l
                            .split_once(' ')
                            .ok_or_else(|| lines.err("vocab row must be `word count`".into()))?;
                        if w != word {
                            return Err(lines.err(format!("expected `{word}`, found `{w}`")));
                        }
                        counts[r] = c
                            .trim()
                            .parse()
                            .map_err(|_| lines.err(format!("bad count `{c}`")))?;
                    }
                }
                CONFIG_SECTION => {
                    while let Some(l) = lines.next()? {
                        if l.trim().is_empty() {
                            continue;
                        }
                        let (k, val) = l
                            .split_once(' ')
                            .ok_or_else(|| lines.err(format!("bad config line `{l}`")))?;
                        let bad = || lines.err(format!("bad value `{val}` for `{k}`"));
                        match k {
                            "architecture" => config.architecture = val.parse().map_err(|_| bad())?,
                            "dim" => {
                                if val.parse::<usize>().map_err(|_| bad())? != dim {
                                    return Err(lines.err("config dim disagrees with header".into()));
                                }
                            }
                            "window" => config.window = val.parse().map_err(|_| bad())?,
                            "negatives" => config.negatives = val.parse().map_err(|_| bad())?,
                            "epochs" => config.epochs = val.parse().map_err(|_| bad())?,
                            "min_count" => config.min_count = val.parse().map_err(|_| bad())?,
                            "seed" => config.seed = val.parse().map_err(|_| bad())?,
                            "initial_lr" => config.initial_lr = val.parse().map_err(|_| bad())?,
                            "subsample_t" => config.subsample_t = Some(val.parse().map_err(|_| bad())?),
                            other => return Err(lines.err(format!("unknown config key `{other}`"))),
                        }
                    }
                }
                other => return Err(lines.err(format!("unexpected line `{other}`"))),
            }
        }

        let vocab = Vocabulary::from_counts(words.iter().cloned().zip(counts).collect(), 1)
            .map_err(|e| lines.err(e.to_string()))?;
        // rows are stored in canonical vocabulary order
        let (input, output) = if vocab.words() == words.as_slice() {
            (input, output)
        } else {
            let mut ri = vec![0.0; v * dim];
            let mut ro = vec![0.0; v * dim];
            for (r, w) in words.iter().enumerate() {
                let i = vocab.index_of(w).unwrap();
                ri[i * dim..(i + 1) * dim].copy_from_slice(&input[r * dim..(r + 1) * dim]);
                ro[i * dim..(i + 1) * dim].copy_from_slice(&output[r * dim..(r + 1) * dim]);
            }
            (ri, ro)
        };
        Self::from_parts(vocab, dim, input, output, config)
    }
}

/// Line reader that remembers the current line number for errors.
struct Lines<'p, I> {
    inner: I,
    path: &'p Path,
    line: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Lines<'_, I> {
    fn next(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(Ok(l)) => {
                self.line += 1;
                Ok(Some(l))
            }
            Some(Err(e)) => Err(Error::io(self.path, e)),
        }
    }

    fn expect(&mut self) -> Result<String> {
        match self.next()? {
            Some(l) => Ok(l),
            None => {
                self.line += 1;
                Err(self.err("unexpected end of file".into()))
            }
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line.max(1),
            message,
        }
    }

    fn rows(&mut self, v: usize, dim: usize, expect_words: Option<&[String]>) -> Result<(Vec<String>, Vec<f64>)> {
        let mut words = Vec::with_capacity(v);
        let mut matrix = Vec::with_capacity(v * dim);
        for r in 0..v {
            let l = self.expect()?;
            let mut parts = l.split_whitespace();
            let word = parts.next().ok_or_else(|| self.err("empty row".into()))?;
            if let Some(ws) = expect_words {
                if ws[r] != word {
                    return Err(self.err(format!("expected row for `{}`, found `{word}`", ws[r])));
                }
            }
            let before = matrix.len();
            for p in parts {
                let x: f64 = p.parse().map_err(|_| self.err(format!("bad number `{p}`")))?;
                if !x.is_finite() {
                    return Err(self.err(format!("non-finite value `{p}`")));
                }
                matrix.push(x);
            }
            if matrix.len() - before != dim {
                return Err(self.err(format!(
                    "expected {dim} components, found {}",
                    matrix.len() - before
                )));
            }
            words.push(word.to_string());
        }
        Ok((words, matrix))
    }
}

pub fn save_model(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    model.write_to(&mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingModel::read_from(BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy() -> EmbeddingModel {
        EmbeddingModel::from_vectors(&[
            ("late", vec![1.0, 0.0]),
            ("later", vec![0.9, 0.1]),
            ("cat", vec![0.0, 1.0]),
        ])
        .unwrap()
    }

    fn parse(text: &str) -> Result<EmbeddingModel> {
        EmbeddingModel::read_from(text.as_bytes(), Path::new("inline"))
    }

    #[test]
    fn neighbours_of_hand_built_model() {
        let m = toy();
        let nn = m.nearest_neighbors("late", 1).unwrap();
        assert_eq!(nn[0].0, "later");
        assert!((nn[0].1 - 0.9 / 0.82f64.sqrt()).abs() < 1e-12);
        assert!((nn[0].1 - 0.99388).abs() < 1e-5);
        let all = m.nearest_neighbors("late", 10).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|(w, _)| w != "late"));
        assert!(matches!(m.nearest_neighbors("zzzq", 3), Err(Error::OutOfVocabulary(w)) if w == "zzzq"));
    }

    #[test]
    fn neighbour_ties_are_lexicographic() {
        let m = EmbeddingModel::from_vectors(&[
            ("q", vec![1.0, 0.0]),
            ("b", vec![0.0, 1.0]),
            ("a", vec![0.0, 2.0]),
        ])
        .unwrap();
        let nn = m.nearest_neighbors("q", 2).unwrap();
        assert_eq!(nn, vec![("a".to_string(), 0.0), ("b".to_string(), 0.0)]);
    }

    #[test]
    fn word_vector_lookup() {
        let m = toy();
        assert_eq!(m.word_vector("cat").unwrap(), &[0.0, 1.0]);
        assert_eq!(m.word_vector("cat").unwrap(), m.word_vector("cat").unwrap());
        assert!(matches!(m.word_vector("zzzq"), Err(Error::OutOfVocabulary(_))));
    }

    #[test]
    fn sentence_embedding_rule() {
        let m = EmbeddingModel::from_vectors(&[("a", vec![3.0, 4.0]), ("b", vec![0.0, 2.0]), ("z", vec![0.0, 0.0])])
            .unwrap();
        let single = m.sentence_embedding(&["a"]).unwrap();
        assert!((single[0] - 0.6).abs() < 1e-15 && (single[1] - 0.8).abs() < 1e-15);
        let pair = m.sentence_embedding(&["a", "b", "oov"]).unwrap();
        assert!((pair[0] - 0.3).abs() < 1e-15 && (pair[1] - 0.9).abs() < 1e-15);
        assert!(m.sentence_embedding(&["nope", "z"]).is_none());
        assert!(m.sentence_embedding::<&str>(&[]).is_none());
    }

    #[test]
    fn roundtrip_preserves_vectors_and_neighbours() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let entries: Vec<(String, Vec<f64>)> = (0..1000)
            .map(|i| (format!("w{i}"), (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let m = EmbeddingModel::from_vectors(&entries).unwrap();
        let back = parse(std::str::from_utf8(&m.to_bytes()).unwrap()).unwrap();
        let delta = m
            .input_matrix()
            .iter()
            .zip(back.input_matrix())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(delta < 1e-8, "max delta {delta}");
        assert_eq!(back.vocabulary().words(), m.vocabulary().words());
        for q in ["w0", "w17", "w999"] {
            let a = m.nearest_neighbors(q, 7).unwrap();
            let b = back.nearest_neighbors(q, 7).unwrap();
            assert_eq!(a.iter().map(|x| &x.0).collect::<Vec<_>>(), b.iter().map(|x| &x.0).collect::<Vec<_>>());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.1 - y.1).abs() < 1e-7);
            }
        }
        // a second save of the loaded model is byte-identical
        assert_eq!(back.to_bytes(), parse(std::str::from_utf8(&back.to_bytes()).unwrap()).unwrap().to_bytes());
    }

    #[test]
    fn short_row_is_a_parse_error_at_its_line() {
        let text = "2 3\na 1 2 3\nb 1 2\n";
        match parse(text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x y\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("1 2\na 1 nan\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn plain_word2vec_text_loads() {
        let m = parse("2 2\nlate 1 0\ncat 0 1\n").unwrap();
        assert_eq!(m.word_vector("late").unwrap(), &[1.0, 0.0]);
        assert!(m.output_matrix().iter().all(|&x| x == 0.0));
    }

    proptest! {
        #[test]
        fn sentence_embedding_bag_semantics(idx in proptest::collection::vec(0usize..6, 1..10), rot in 0usize..10) {
            let m = EmbeddingModel::from_vectors(&[
                ("a", vec![3.0, 4.0, 0.0]), ("b", vec![0.0, 2.0, -1.0]), ("c", vec![-5.0, 0.5, 0.5]),
                ("d", vec![1e-3, 0.0, 0.0]), ("e", vec![0.0, 0.0, 9.0]),
            ]).unwrap();
            let words = ["a", "b", "c", "d", "e", "oov"];
            let tokens: Vec<&str> = idx.iter().map(|&i| words[i]).collect();
            let mut rotated = tokens.clone();
            let len = rotated.len();
            rotated.rotate_left(rot % len);
            let x = m.sentence_embedding(&tokens);
            let y = m.sentence_embedding(&rotated);
            prop_assert_eq!(x.is_some(), y.is_some());
            if let (Some(x), Some(y)) = (x, y) {
                for (p, q) in x.iter().zip(&y) {
                    prop_assert!((p - q).abs() < 1e-12);
                    prop_assert!(p.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }
}

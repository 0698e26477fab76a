use std::fmt::Write as _;
use std::path::Path;

use super::lda::LdaModel;
use crate::error::{Error, Result};

/// The `n` most probable words of `topic`, ties in lexicographic order.
pub fn top_keywords(model: &LdaModel, topic: usize, n: usize) -> Result<Vec<(String, f64)>> {
    if topic >= model.num_topics() {
        return Err(Error::invalid(format!(
            "topic {topic} out of range (K = {})",
            model.num_topics()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let mut words: Vec<(String, f64)> = model
        .vocabulary()
        .iter()
        .enumerate()
        .map(|(w, word)| (word.clone(), model.phi(topic, w)))
        .collect();
    words.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    words.truncate(n);
    Ok(words)
}

/// Share of topic `k` averaged over the training documents.
fn prevalence(model: &LdaModel) -> Vec<f64> {
    let k = model.num_topics();
    let mut p = vec![0.0; k];
    for d in 0..model.num_docs() {
        for (t, x) in model.theta_row(d).into_iter().enumerate() {
            p[t] += x;
        }
    }
    let n = model.num_docs().max(1) as f64;
    p.iter_mut().for_each(|x| *x /= n);
    p
}

pub(crate) fn keyword_line(word: &str, phi: f64) -> String {
    format!("  {word}\t{phi:.6}")
}

/// Plain-text report, one block per topic.
pub fn render_report(model: &LdaModel, n_keywords: usize) -> Result<String> {
    let p = model.params();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# K={} alpha={} beta={} sweeps={} seed={} docs={}",
        p.k,
        p.alpha,
        p.beta,
        model.sweeps(),
        p.seed,
        model.num_docs()
    );
    for (k, share) in prevalence(model).into_iter().enumerate() {
        let _ = writeln!(out, "\ntopic {k}\tprevalence {share:.6}");
        for (word, phi) in top_keywords(model, k, n_keywords)? {
            out.push_str(&keyword_line(&word, phi));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn topics_report(model: &LdaModel, n_keywords: usize, path: impl AsRef<Path>) -> Result<()> {
    let text = render_report(model, n_keywords)?;
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

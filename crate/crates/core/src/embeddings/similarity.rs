use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine of the angle between two vectors: `a·b / (|a| |b|)`.
///
/// Zero-norm inputs are an error rather than a silent zero.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let aa = dot(a, a);
    let bb = dot(b, b);
    if aa == 0.0 || bb == 0.0 || !aa.is_finite() || !bb.is_finite() {
        return Err(Error::UndefinedSimilarity);
    }
    // sqrt(aa * bb) keeps cos(a, a) == 1 exactly and the result symmetric
    Ok((dot(a, b) / (aa * bb).sqrt()).clamp(-1.0, 1.0))
}

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embeddings::{norm, EmbeddingModel};
use crate::error::{Error, Result};
use crate::preprocess::mapping_tokens_of;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntentUseCase {
    pub name: String,
    pub variations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntentDomain {
    pub name: String,
    pub use_cases: Vec<IntentUseCase>,
}

/// Domains → use cases → variation phrases, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Taxonomy {
    pub domains: Vec<IntentDomain>,
}

impl Taxonomy {
    pub fn new(domains: Vec<IntentDomain>) -> Result<Self> {
        let t = Taxonomy { domains };
        t.validate()?;
        Ok(t)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Taxonomy = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("taxonomy serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return Err(Error::invalid("taxonomy has no domain"));
        }
        let mut domains = HashSet::new();
        let mut use_cases = HashSet::new();
        for d in &self.domains {
            if d.name.trim().is_empty() {
                return Err(Error::invalid("empty domain name"));
            }
            if !domains.insert(d.name.as_str()) {
                return Err(Error::invalid(format!("duplicate domain `{}`", d.name)));
            }
            if d.use_cases.is_empty() {
                return Err(Error::invalid(format!("domain `{}` has no use case", d.name)));
            }
            for u in &d.use_cases {
                if u.name.trim().is_empty() {
                    return Err(Error::invalid("empty use case name"));
                }
                if !use_cases.insert(u.name.as_str()) {
                    return Err(Error::invalid(format!("duplicate use case `{}`", u.name)));
                }
                if u.variations.is_empty() {
                    return Err(Error::invalid(format!("use case `{}` has no variation", u.name)));
                }
            }
        }
        Ok(())
    }

    /// `(domain index, use case)` pairs in declaration order.
    pub fn use_cases(&self) -> impl Iterator<Item = (usize, &IntentUseCase)> {
        self.domains
            .iter()
            .enumerate()
            .flat_map(|(i, d)| d.use_cases.iter().map(move |u| (i, u)))
    }

    pub fn contains_use_case(&self, name: &str) -> bool {
        self.use_cases().any(|(_, u)| u.name == name)
    }
}

pub fn load_taxonomy(path: impl AsRef<Path>) -> Result<Taxonomy> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Taxonomy::from_json(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedUseCase {
    pub domain: usize,
    pub name: String,
    pub variations: Vec<Vec<f64>>,
}

/// A taxonomy whose every variation has a sentence embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedTaxonomy {
    taxonomy: Taxonomy,
    use_cases: Vec<EmbeddedUseCase>,
    model_fingerprint: String,
}

impl EmbeddedTaxonomy {
    /// Attaches precomputed vectors, one list per use case in declaration order.
    pub fn from_vectors(taxonomy: Taxonomy, vectors: Vec<Vec<Vec<f64>>>, fingerprint: impl Into<String>) -> Result<Self> {
        taxonomy.validate()?;
        let slots: Vec<(usize, &IntentUseCase)> = taxonomy.use_cases().collect();
        if slots.len() != vectors.len() {
            return Err(Error::invalid("one vector list per use case expected"));
        }
        let mut dim = None;
        let mut use_cases = Vec::with_capacity(slots.len());
        for ((domain, u), vs) in slots.into_iter().zip(vectors) {
            if vs.len() != u.variations.len() {
                return Err(Error::invalid(format!("use case `{}`: vector count mismatch", u.name)));
            }
            for v in &vs {
                if *dim.get_or_insert(v.len()) != v.len() || v.is_empty() {
                    return Err(Error::invalid("variation vectors differ in dimension"));
                }
                if norm(v) == 0.0 || !v.iter().all(|x| x.is_finite()) {
                    return Err(Error::invalid(format!("use case `{}` has a degenerate variation vector", u.name)));
                }
            }
            use_cases.push(EmbeddedUseCase {
                domain,
                name: u.name.clone(),
                variations: vs,
            });
        }
        Ok(EmbeddedTaxonomy {
            taxonomy,
            use_cases,
            model_fingerprint: fingerprint.into(),
        })
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn use_cases(&self) -> &[EmbeddedUseCase] {
        &self.use_cases
    }

    pub fn domain_name(&self, domain: usize) -> &str {
        &self.taxonomy.domains[domain].name
    }

    pub fn dim(&self) -> usize {
        self.use_cases[0].variations[0].len()
    }

    pub fn model_fingerprint(&self) -> &str {
        &self.model_fingerprint
    }
}

/// Embeds every variation with the mapping pipeline and norm-averaging.
pub fn embed_taxonomy(taxonomy: &Taxonomy, model: &EmbeddingModel) -> Result<EmbeddedTaxonomy> {
    let mut vectors = Vec::new();
    for (_, u) in taxonomy.use_cases() {
        let mut vs = Vec::with_capacity(u.variations.len());
        for variation in &u.variations {
            let tokens = mapping_tokens_of(variation);
            if tokens.is_empty() {
                return Err(Error::invalid(format!(
                    "variation `{variation}` of `{}` is empty after preprocessing",
                    u.name
                )));
            }
            let v = model
                .sentence_embedding(&tokens)
                .ok_or_else(|| Error::UnembeddableVariation {
                    use_case: u.name.clone(),
                    variation: variation.clone(),
                })?;
            vs.push(v);
        }
        vectors.push(vs);
    }
    EmbeddedTaxonomy::from_vectors(taxonomy.clone(), vectors, model.fingerprint())
}

//! A small bundled support-desk world: a taxonomy, a generator for an
//! unlabelled training corpus, and a generator for labelled test tickets.
//!
//! Every use case owns a private vocabulary of lemma fixed points, so the
//! embedding and mapping pipelines see the same surface forms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{default_noise_words, GeneratorSpec, Ticket, TicketCollection};
use crate::error::Result;
use crate::eval::LabelledSet;
use crate::intent::{IntentDomain, IntentUseCase, Taxonomy};

pub struct DemoUseCase {
    pub domain: &'static str,
    pub name: &'static str,
    /// Taxonomy variations.
    pub variations: [&'static str; 4],
    /// Wording used only by labelled tickets.
    pub held_out: &'static str,
    /// Extra phrasings seen only in the training corpus.
    pub extra: [&'static str; 2],
}

pub const USE_CASES: [DemoUseCase; 8] = [
    DemoUseCase {
        domain: "Account Related",
        name: "Account Settings",
        variations: [
            "change my profile password",
            "update the username on my profile",
            "how do i change my avatar",
            "update display preference",
        ],
        held_out: "update the password and the username",
        extra: ["profile avatar change", "preference display password"],
    },
    DemoUseCase {
        domain: "Account Related",
        name: "Close Account",
        variations: [
            "close my account",
            "cancel my membership",
            "delete account",
            "terminate my membership permanent",
        ],
        held_out: "remove and close the account",
        extra: ["account delete permanent", "cancel remove membership"],
    },
    DemoUseCase {
        domain: "Account Related",
        name: "Account Migration",
        variations: [
            "migrate my store to a region",
            "transfer to the country",
            "merge after i relocate",
            "switch store region",
        ],
        held_out: "i relocate country and migrate",
        extra: ["merge transfer region", "switch country store migrate"],
    },
    DemoUseCase {
        domain: "Order Related",
        name: "Quality Issue",
        variations: [
            "it is broken",
            "there is a defect and a scratch",
            "faulty quality",
            "crack and damage",
        ],
        held_out: "torn and faulty with a crack",
        extra: ["broken damage defect", "quality scratch torn"],
    },
    DemoUseCase {
        domain: "Order Related",
        name: "Order Return",
        variations: [
            "return this postage",
            "how do i refund",
            "send it back for an exchange",
            "a return label",
        ],
        held_out: "postage refund with receipt",
        extra: ["return label receipt", "exchange send back"],
    },
    DemoUseCase {
        domain: "Order Related",
        name: "Delivery Delay",
        variations: [
            "my parcel is late",
            "delivery delay",
            "courier did not arrive",
            "wait for the parcel track",
        ],
        held_out: "track the late courier delivery",
        extra: ["arrive delay wait", "parcel track courier"],
    },
    DemoUseCase {
        domain: "Payment Related",
        name: "Checkout Assistance",
        variations: [
            "checkout button",
            "coupon at checkout",
            "card payment in cart",
            "promo for basket",
        ],
        held_out: "payment from my basket with a promo coupon",
        extra: ["cart checkout card", "button basket coupon promo"],
    },
    DemoUseCase {
        domain: "Payment Related",
        name: "Tax Exemption",
        variations: [
            "we are tax exempt",
            "exemption certificate",
            "vat on the invoice",
            "nonprofit charity tax",
        ],
        held_out: "charity certificate for vat exemption",
        extra: ["exempt nonprofit invoice", "tax vat certificate"],
    },
];

/// The bundled taxonomy: 3 domains, 8 use cases, 4 variations each.
pub fn taxonomy() -> Taxonomy {
    let mut domains: Vec<IntentDomain> = Vec::new();
    for u in &USE_CASES {
        let use_case = IntentUseCase {
            name: u.name.to_string(),
            variations: u.variations.iter().map(|v| v.to_string()).collect(),
        };
        match domains.iter_mut().find(|d| d.name == u.domain) {
            Some(d) => d.use_cases.push(use_case),
            None => domains.push(IntentDomain {
                name: u.domain.to_string(),
                use_cases: vec![use_case],
            }),
        }
    }
    Taxonomy::new(domains).expect("bundled taxonomy is valid")
}

/// Generator for an unlabelled training corpus built from the variations
/// and extra phrasings, with 10% token noise.
pub fn training_spec(n_tickets: usize, seed: u64) -> GeneratorSpec {
    let mut spec = GeneratorSpec::new(n_tickets, seed).noise(0.1);
    for u in &USE_CASES {
        let templates: Vec<&str> = u.variations.iter().chain(&u.extra).copied().collect();
        spec = spec.plant(&plant_name(u.name), &templates);
    }
    spec.subject_rate = 0.3;
    spec
}

fn plant_name(use_case: &str) -> String {
    use_case.to_lowercase().replace(' ', "_")
}

/// Labelled tickets, balanced across use cases. Each body is the held-out
/// wording with generic noise words inserted until they make up
/// `noise_fraction` of the tokens.
pub fn labelled_tickets(n: usize, noise_fraction: f64, seed: u64) -> Result<(TicketCollection, LabelledSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = default_noise_words();
    let mut tickets = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let u = &USE_CASES[i % USE_CASES.len()];
        let mut words: Vec<String> = u.held_out.split(' ').map(str::to_string).collect();
        let content = words.len() as f64;
        let extra = (content * noise_fraction / (1.0 - noise_fraction)).round() as usize;
        for _ in 0..extra {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, noise.choose(&mut rng).unwrap().clone());
        }
        let id = format!("lab-{i:05}");
        tickets.push(Ticket::new(id.clone(), format!("{}.", words.join(" "))));
        labels.push((id, u.name.to_string()));
    }
    Ok((
        TicketCollection::new(tickets, format!("labelled(seed={seed})"))?,
        LabelledSet::new(labels)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{lemmatize_word, mapping_tokens_of};
    use std::collections::HashMap;

    #[test]
    fn taxonomy_shape() {
        let t = taxonomy();
        assert_eq!(t.domains.len(), 3);
        assert_eq!(t.use_cases().count(), 8);
        assert!(t.use_cases().all(|(_, u)| u.variations.len() == 4));
    }

    #[test]
    fn vocabularies_are_private_and_lemma_stable() {
        let mut owner: HashMap<String, &str> = HashMap::new();
        for u in &USE_CASES {
            let phrases = u.variations.iter().chain(&u.extra).chain([&u.held_out]);
            for p in phrases {
                let toks = mapping_tokens_of(p);
                assert!(!toks.is_empty(), "{p}");
                for w in toks {
                    assert_eq!(lemmatize_word(&w), w);
                    let prev = owner.insert(w.clone(), u.name);
                    assert!(prev.is_none() || prev == Some(u.name), "`{w}` shared by {prev:?} and {}", u.name);
                }
            }
            for w in mapping_tokens_of(u.held_out) {
                let seen = u.variations.iter().chain(&u.extra).any(|p| mapping_tokens_of(p).contains(&w));
                assert!(seen, "held-out word `{w}` of {} never appears in training", u.name);
            }
        }
        for w in default_noise_words() {
            assert!(!owner.contains_key(&w));
        }
    }

    #[test]
    fn labelled_noise_fraction() {
        let (c, l) = labelled_tickets(16, 0.3, 1).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(l.labels()[9].1, "Close Account");
        let noise = default_noise_words();
        for t in c.iter() {
            let words: Vec<&str> = t.body.trim_end_matches('.').split(' ').collect();
            let n = words.iter().filter(|w| noise.iter().any(|x| x == *w)).count();
            let frac = n as f64 / words.len() as f64;
            assert!((frac - 0.3).abs() < 0.08, "{frac} in {}", t.body);
        }
        assert_eq!(labelled_tickets(16, 0.3, 1).unwrap().0, c);
    }
}

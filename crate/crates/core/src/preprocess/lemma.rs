//! Rule-based lemmatizer: an exception table for irregular forms, then a few
//! English suffix rules.

use std::collections::HashMap;
use std::sync::LazyLock;

use super::data_lines;

static EXCEPTIONS_TXT: &str = include_str!("../../data/lemma_exceptions.txt");

static EXCEPTIONS: LazyLock<HashMap<&'static str, &'static str>> = LazyLock::new(|| {
    data_lines(EXCEPTIONS_TXT)
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?, it.next()?))
        })
        .collect()
});

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(is_vowel)
}

/// `shipp` -> `ship`, `runn` -> `run`; `fall`, `pass`, `buzz`, `staff` are left alone.
fn undouble(stem: &str) -> &str {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z' | b'f') {
        &stem[..n - 1]
    } else {
        stem
    }
}

/// Puts back the silent `e` a suffix took with it: `promis` -> `promise`,
/// `reduc` -> `reduce`, `solv` -> `solve`.
fn restore_e(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    let last = b[n - 1];
    let doubled = b[n - 2] == last;
    let silent_e = matches!(last, b'c' | b'u' | b'v' | b'z')
        || (last == b's' && matches!(b[n - 2], b'a' | b'i' | b'o' | b'u'));
    if silent_e && !doubled {
        format!("{stem}e")
    } else {
        stem.to_string()
    }
}

fn strip_verb_suffix(stem: &str) -> String {
    let short = undouble(stem);
    if short.len() < stem.len() {
        short.to_string()
    } else {
        restore_e(stem)
    }
}

pub fn lemmatize_word(word: &str) -> String {
    if let Some(lemma) = EXCEPTIONS.get(word) {
        return lemma.to_string();
    }
    let n = word.len();
    if n <= 3 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if n > 4 {
            return format!("{stem}y");
        }
    }
    if ["sses", "xes", "zes", "ches", "shes"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 2].to_string();
    }
    if let Some(stem) = word.strip_suffix('s') {
        return stem.to_string();
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if stem.len() >= 3 && has_vowel(stem) {
            return strip_verb_suffix(stem);
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if !word.ends_with("eed") && stem.len() >= 3 && has_vowel(stem) {
            return strip_verb_suffix(stem);
        }
    }
    word.to_string()
}

/// Maps every token to its lemma; the output has the input's length.
pub fn lemmatize(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| lemmatize_word(t)).collect()
}

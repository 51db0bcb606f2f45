use serde::{Deserialize, Serialize};

use super::EvalError;

/// Levenshtein distance with unit substitution, insertion and deletion costs.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> usize {
    if reference.is_empty() {
        return hypothesis.len();
    }
    if hypothesis.is_empty() {
        return reference.len();
    }
    let mut prev: Vec<usize> = (0..=hypothesis.len()).collect();
    let mut curr = vec![0usize; hypothesis.len() + 1];
    for (i, r) in reference.iter().enumerate() {
        curr[0] = i + 1;
        for (j, h) in hypothesis.iter().enumerate() {
            let sub = prev[j] + usize::from(r != h);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[hypothesis.len()]
}

/// Edit count, reference length and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRate {
    pub edits: usize,
    pub reference_len: usize,
    pub rate: f64,
}

/// `edit_distance / len(reference)`; may exceed 1.
pub fn error_rate<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> Result<ErrorRate, EvalError> {
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let edits = edit_distance(reference, hypothesis);
    Ok(ErrorRate {
        edits,
        reference_len: reference.len(),
        rate: edits as f64 / reference.len() as f64,
    })
}

/// Lowercase, punctuation removed, whitespace split.
pub fn word_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| !c.is_ascii_punctuation() && !is_unicode_punct(*c))
                .flat_map(char::to_lowercase)
                .collect::<String>()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Characters of the normalized words, whitespace excluded.
pub fn char_tokens(text: &str) -> Vec<char> {
    word_tokens(text).iter().flat_map(|w| w.chars()).collect()
}

fn is_unicode_punct(c: char) -> bool {
    matches!(
        c,
        '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}' | '\u{2013}' | '\u{2014}' | '\u{2026}'
            | '\u{00AB}' | '\u{00BB}' | '\u{00BF}' | '\u{00A1}'
    )
}

/// Word error rate of `hypothesis` against `reference` text.
pub fn wer(reference: &str, hypothesis: &str) -> Result<ErrorRate, EvalError> {
    error_rate(&word_tokens(reference), &word_tokens(hypothesis))
}

/// Character error rate of `hypothesis` against `reference` text.
pub fn cer(reference: &str, hypothesis: &str) -> Result<ErrorRate, EvalError> {
    error_rate(&char_tokens(reference), &char_tokens(hypothesis))
}

//! Extraction and repair of the model's JSON answer.

use serde_json::{Map, Value};

use super::template::RawRanges;
use crate::prosody::{Interval, RawFactors, RawScalingPlan, WordFactors};
use crate::warning::Warning;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("no JSON object found in the response")]
    NoJson,
    #[error("JSON object does not follow the output contract: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPlan {
    pub plan: RawScalingPlan<f64>,
    pub warnings: Vec<Warning>,
}

/// Returns the first syntactically complete JSON object embedded in `text`.
///
/// Code fences and surrounding prose are skipped over.
pub fn extract_json_object(text: &str) -> Option<Map<String, Value>> {
    for (pos, _) in text.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&text[pos..]).into_iter::<Value>();
        if let Some(Ok(Value::Object(map))) = stream.next() {
            return Some(map);
        }
    }
    None
}

/// Parses a model reply into a plan aligned with `expected_words`.
///
/// Out-of-range numbers are clamped, missing or malformed numbers become 0,
/// missing trailing words are padded with zeros and extra words are dropped.
/// Each repair adds a warning.
pub fn parse_response(
    raw_text: &str,
    expected_words: &[String],
    ranges: &RawRanges,
) -> Result<ParsedPlan, ParseError> {
    let obj = extract_json_object(raw_text).ok_or(ParseError::NoJson)?;
    let global = match obj.get("global") {
        Some(Value::Object(g)) => g,
        Some(_) => return Err(ParseError::Schema("`global` is not an object".into())),
        None => return Err(ParseError::Schema("missing `global`".into())),
    };
    let words = match obj.get("words") {
        Some(Value::Array(w)) => w,
        Some(_) => return Err(ParseError::Schema("`words` is not an array".into())),
        None => return Err(ParseError::Schema("missing `words`".into())),
    };

    let mut warnings = Vec::new();
    let global = read_factors(global, "global", ranges, &mut warnings);

    let mut locals = Vec::with_capacity(expected_words.len());
    for (i, expected) in expected_words.iter().enumerate() {
        let prefix = format!("words[{i}]");
        let factors = match words.get(i) {
            Some(Value::Object(entry)) => {
                match entry.get("word") {
                    Some(Value::String(w)) if !same_word(w, expected) => warnings.push(Warning::new(
                        format!("{prefix}.word"),
                        format!("model wrote `{w}`, expected `{expected}`"),
                    )),
                    Some(Value::String(_)) | None => {}
                    Some(_) => warnings.push(Warning::new(
                        format!("{prefix}.word"),
                        "word is not a string",
                    )),
                }
                read_factors(entry, &prefix, ranges, &mut warnings)
            }
            Some(_) => {
                warnings.push(Warning::new(&prefix, "entry is not an object, using zeros"));
                RawFactors::zero()
            }
            None => {
                warnings.push(Warning::new(&prefix, "missing entry, padded with zeros"));
                RawFactors::zero()
            }
        };
        locals.push(WordFactors::new(expected.clone(), factors));
    }
    if words.len() > expected_words.len() {
        warnings.push(Warning::new(
            "words",
            format!(
                "{} entries for {} words, extra entries dropped",
                words.len(),
                expected_words.len()
            ),
        ));
    }

    let rationale = ["reasoning", "rationale"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(Value::as_str))
        .map(str::to_string);

    Ok(ParsedPlan {
        plan: RawScalingPlan {
            global,
            locals,
            rationale,
        },
        warnings,
    })
}

/// Clamps every value of `plan` into `ranges`, warning on each change.
pub fn clamp_plan(plan: &mut RawScalingPlan<f64>, ranges: &RawRanges) -> Vec<Warning> {
    let mut warnings = Vec::new();
    let mut fix = |field: String, v: &mut f64, iv: &Interval<f64>| {
        let c = iv.clamp(*v);
        if c != *v || v.is_nan() {
            warnings.push(Warning::new(field, format!("{v} outside [{}, {}], clamped to {c}", iv.lo, iv.hi)));
            *v = c;
        }
    };
    fix("global.pitch".into(), &mut plan.global.pitch, &ranges.pitch);
    fix("global.energy".into(), &mut plan.global.energy, &ranges.energy);
    fix("global.duration".into(), &mut plan.global.duration, &ranges.duration);
    for (i, w) in plan.locals.iter_mut().enumerate() {
        fix(format!("words[{i}].pitch"), &mut w.pitch, &ranges.pitch);
        fix(format!("words[{i}].energy"), &mut w.energy, &ranges.energy);
        fix(format!("words[{i}].duration"), &mut w.duration, &ranges.duration);
    }
    warnings
}

fn read_factors(
    obj: &Map<String, Value>,
    prefix: &str,
    ranges: &RawRanges,
    warnings: &mut Vec<Warning>,
) -> RawFactors<f64> {
    let mut read = |key: &str, iv: &Interval<f64>| -> f64 {
        let field = format!("{prefix}.{key}");
        let value = match obj.get(key) {
            Some(Value::Number(n)) => n.as_f64(),
            Some(Value::String(s)) => s.trim().trim_start_matches('+').parse::<f64>().ok(),
            _ => None,
        };
        match value {
            Some(v) if v.is_finite() => {
                let c = iv.clamp(v);
                if c != v {
                    warnings.push(Warning::new(
                        field,
                        format!("{v} outside [{}, {}], clamped to {c}", iv.lo, iv.hi),
                    ));
                }
                c
            }
            _ => {
                warnings.push(Warning::new(field, "missing or not a number, using 0"));
                0.0
            }
        }
    };
    RawFactors {
        pitch: read("pitch", &ranges.pitch),
        energy: read("energy", &ranges.energy),
        duration: read("duration", &ranges.duration),
    }
}

fn same_word(a: &str, b: &str) -> bool {
    let norm = |s: &str| -> String {
        s.chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect()
    };
    norm(a) == norm(b)
}

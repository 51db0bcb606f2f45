use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// One opinion score on the 0–5 scale, with any grouping attributes
/// (model, prompt-control setting, ...) carried alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosRating {
    pub rater: String,
    pub utterance: String,
    pub score: f64,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosGroup {
    /// Attribute values joined with `/`, or `all` when ungrouped.
    pub key: String,
    pub mean: f64,
    pub count: usize,
    pub std: f64,
    /// 95% normal-approximation interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

const Z_95: f64 = 1.959_963_984_540_054;

/// Mean and 95% CI per group, groups in lexicographic key order.
pub fn mos_aggregate(ratings: &[MosRating], group_by: &[String]) -> Result<Vec<MosGroup>, EvalError> {
    if ratings.is_empty() {
        return Err(EvalError::Empty("MOS ratings"));
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in ratings {
        if !(0.0..=5.0).contains(&r.score) {
            return Err(EvalError::OutOfRange(format!(
                "score {} from rater {} for {} is outside [0, 5]",
                r.score, r.rater, r.utterance
            )));
        }
        let key = if group_by.is_empty() {
            "all".to_string()
        } else {
            group_by
                .iter()
                .map(|g| {
                    r.attributes.get(g).cloned().ok_or_else(|| {
                        EvalError::MissingColumn(format!("rating has no `{g}` attribute"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
                .join("/")
        };
        groups.entry(key).or_default().push(r.score);
    }
    Ok(groups
        .into_iter()
        .map(|(key, scores)| {
            let n = scores.len() as f64;
            let mean = scores.iter().sum::<f64>() / n;
            let std = if scores.len() > 1 {
                (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let half = Z_95 * std / n.sqrt();
            MosGroup {
                key,
                mean,
                count: scores.len(),
                std,
                ci_low: mean - half,
                ci_high: mean + half,
            }
        })
        .collect())
}

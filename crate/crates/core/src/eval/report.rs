use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::classify::ConfusionMatrix;
use super::mos::MosGroup;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub utterance_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub count: usize,
}

/// Result of one metric run, serializable to JSON and plot-ready CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: String,
    /// Settings that influence the numbers (e.g. `mcd_exclude_c0`).
    pub config: BTreeMap<String, String>,
    pub per_utterance: Vec<UtteranceScore>,
    pub aggregate: Aggregate,
    /// Total edits over total reference length, for WER/CER.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pooled: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_level_recall: Option<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<MosGroup>,
    /// Inputs that could not be scored.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl EvalReport {
    pub fn from_scores(metric: impl Into<String>, per_utterance: Vec<UtteranceScore>) -> Self {
        let count = per_utterance.len();
        let mean = if count == 0 {
            0.0
        } else {
            per_utterance.iter().map(|s| s.value).sum::<f64>() / count as f64
        };
        Self {
            metric: metric.into(),
            config: BTreeMap::new(),
            per_utterance,
            aggregate: Aggregate { mean, count },
            pooled: None,
            accuracy: None,
            confusion: None,
            per_level_recall: None,
            groups: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn pir(confusion: ConfusionMatrix) -> Self {
        let mut report = Self::from_scores("pir", Vec::new());
        report.aggregate = Aggregate {
            mean: confusion.accuracy(),
            count: confusion.total() as usize,
        };
        report.accuracy = Some(confusion.accuracy());
        report.per_level_recall = Some(confusion.recall());
        report.confusion = Some(confusion);
        report
    }

    pub fn mos(groups: Vec<MosGroup>) -> Self {
        let mut report = Self::from_scores("mos", Vec::new());
        let count: usize = groups.iter().map(|g| g.count).sum();
        let mean = groups.iter().map(|g| g.mean * g.count as f64).sum::<f64>() / count.max(1) as f64;
        report.aggregate = Aggregate { mean, count };
        report.groups = groups;
        report
    }
}

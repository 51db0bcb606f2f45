use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_to_string, Batch, FormatError, RowError};
use crate::eval::{MosRating, PirResponse};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub utterance_id: String,
    pub text: String,
}

/// One classifier decision: predicted and ground-truth label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRow {
    pub utterance_id: String,
    pub pred: String,
    pub truth: String,
}

/// Header-driven CSV reading: `required` columns must exist, every other
/// column is handed to `convert` by name.
fn read_csv<T>(
    path: &Path,
    required: &[&str],
    mut convert: impl FnMut(&BTreeMap<&str, &str>) -> Result<T, String>,
) -> Result<Batch<T>, FormatError> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FormatError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(FormatError::Parse {
                path: path.to_path_buf(),
                message: format!("missing required column `{col}`"),
            });
        }
    }
    let mut batch = Batch::default();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let parsed = record.map_err(|e| e.to_string()).and_then(|r| {
            if r.len() != headers.len() {
                return Err(format!("expected {} fields, found {}", headers.len(), r.len()));
            }
            let fields: BTreeMap<&str, &str> = headers.iter().zip(r.iter()).collect();
            convert(&fields)
        });
        match parsed {
            Ok(item) => batch.items.push(item),
            Err(message) => batch.errors.push(RowError { line, message }),
        }
    }
    Ok(batch)
}

fn get<'a>(fields: &BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str, String> {
    match fields.get(key) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("empty `{key}`")),
    }
}

/// `utterance_id,text`
pub fn read_transcripts(path: &Path) -> Result<Batch<Transcript>, FormatError> {
    read_csv(path, &["utterance_id", "text"], |f| {
        Ok(Transcript {
            utterance_id: get(f, "utterance_id")?.to_string(),
            text: f.get("text").copied().unwrap_or("").to_string(),
        })
    })
}

/// `utterance_id,pred,truth`
pub fn read_labels(path: &Path) -> Result<Batch<LabelRow>, FormatError> {
    read_csv(path, &["utterance_id", "pred", "truth"], |f| {
        Ok(LabelRow {
            utterance_id: get(f, "utterance_id")?.to_string(),
            pred: get(f, "pred")?.to_string(),
            truth: get(f, "truth")?.to_string(),
        })
    })
}

/// `rater_id,utterance_id,perceived,annotated` with Low/Medium/High levels.
pub fn read_pir_responses(path: &Path) -> Result<Batch<PirResponse>, FormatError> {
    read_csv(path, &["rater_id", "utterance_id", "perceived", "annotated"], |f| {
        let level = |k: &str| get(f, k)?.parse().map_err(|e| format!("{k}: {e}"));
        Ok(PirResponse {
            rater_id: get(f, "rater_id")?.to_string(),
            utterance_id: get(f, "utterance_id")?.to_string(),
            perceived: level("perceived")?,
            annotated: level("annotated")?,
        })
    })
}

/// `rater,utterance,score` plus any attribute columns used for grouping.
pub fn read_mos_ratings(path: &Path) -> Result<Batch<MosRating>, FormatError> {
    read_csv(path, &["rater", "utterance", "score"], |f| {
        let raw = get(f, "score")?;
        let score: f64 = raw.parse().map_err(|_| format!("score `{raw}` is not a number"))?;
        let attributes = f
            .iter()
            .filter(|(k, _)| !matches!(**k, "rater" | "utterance" | "score"))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Ok(MosRating {
            rater: get(f, "rater")?.to_string(),
            utterance: get(f, "utterance")?.to_string(),
            score,
            attributes,
        })
    })
}

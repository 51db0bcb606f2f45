use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_jsonl, read_to_string, write_string, Batch, FormatError, PLAN_SCHEMA_VERSION};
use crate::prosody::RawScalingPlan;

/// One line of a plans file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub utterance_id: String,
    #[serde(default)]
    pub degraded: bool,
    #[serde(default)]
    pub attempts: u32,
    pub plan: RawScalingPlan<f64>,
}

#[derive(Serialize)]
struct PlanLine<'a> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a PlanRecord,
}

pub fn read_plans(path: &Path) -> Result<Batch<PlanRecord>, FormatError> {
    let text = read_to_string(path)?;
    Ok(parse_jsonl(&text, PLAN_SCHEMA_VERSION, |v| {
        serde_json::from_value(v).map_err(|e| e.to_string())
    }))
}

pub fn write_plans(path: &Path, plans: &[PlanRecord]) -> Result<(), FormatError> {
    let mut s = String::new();
    for record in plans {
        let line = PlanLine {
            schema_version: PLAN_SCHEMA_VERSION,
            record,
        };
        s.push_str(&serde_json::to_string(&line).expect("plan serializes"));
        s.push('\n');
    }
    write_string(path, &s)
}

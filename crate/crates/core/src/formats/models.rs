use std::path::Path;

use serde::Serialize;

use super::{check_version, read_to_string, write_string, FormatError, MODEL_SCHEMA_VERSION};
use crate::rank::{Emotion, ModelSet, RankModel};

#[derive(Serialize)]
struct ModelDoc<'a> {
    schema_version: u32,
    #[serde(flatten)]
    model: &'a RankModel<f64>,
}

/// `{speaker}_{emotion}.json`, with path-hostile characters replaced.
pub fn model_file_name(speaker: &str, emotion: Emotion) -> String {
    let safe: String = speaker
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    format!("{safe}_{}.json", emotion.as_str().to_lowercase())
}

pub fn write_model(path: &Path, model: &RankModel<f64>) -> Result<(), FormatError> {
    let doc = ModelDoc {
        schema_version: MODEL_SCHEMA_VERSION,
        model,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
    s.push('\n');
    write_string(path, &s)
}

pub fn read_model(path: &Path) -> Result<RankModel<f64>, FormatError> {
    let text = read_to_string(path)?;
    let parse = |message: String| FormatError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse(e.to_string()))?;
    check_version(&mut value, MODEL_SCHEMA_VERSION).map_err(|(found, message)| {
        if found == 0 {
            parse(message)
        } else {
            FormatError::SchemaVersion {
                path: path.to_path_buf(),
                found,
                expected: MODEL_SCHEMA_VERSION,
            }
        }
    })?;
    let model: RankModel<f64> = serde_json::from_value(value).map_err(|e| parse(e.to_string()))?;
    model.validate().map_err(|e| parse(e.to_string()))?;
    Ok(model)
}

/// Loads every `*.json` model in `dir`.
pub fn read_model_dir(dir: &Path) -> Result<ModelSet<f64>, FormatError> {
    let io = super::io_err(dir);
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut set = ModelSet::new();
    for p in paths {
        let m = read_model(&p)?;
        set.insert((m.speaker.clone(), m.emotion), m);
    }
    Ok(set)
}

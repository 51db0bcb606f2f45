//! On-disk formats. Every persisted document carries a `schema_version`;
//! batch readers keep going past bad rows and report them in a ledger.

mod cepstra;
mod eval_inputs;
mod features;
mod models;
mod plans;
mod reports;
mod tracks;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use cepstra::{read_cepstra, read_cepstra_dir, write_cepstra_bin, write_cepstra_csv, CepstraSidecar};
pub use eval_inputs::{read_labels, read_mos_ratings, read_pir_responses, read_transcripts, LabelRow, Transcript};
pub use features::{read_features, write_features, FeatureLayout};
pub use models::{read_model, read_model_dir, write_model, model_file_name};
pub use plans::{read_plans, write_plans, PlanRecord};
pub use reports::{read_annotations, read_report, write_annotations, write_report, write_report_csv};
pub use tracks::{read_track, read_tracks, write_track, write_tracks};

pub const TRACK_SCHEMA_VERSION: u32 = 1;
pub const PLAN_SCHEMA_VERSION: u32 = 1;
pub const MODEL_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One rejected row of a batch file. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

/// Parsed rows plus the ledger of rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub items: Vec<T>,
    pub errors: Vec<RowError>,
}

impl<T> Default for Batch<T> {
    fn default() -> Self {
        Self {
            items: Vec::new(),
            errors: Vec::new(),
        }
    }
}

impl<T> Batch<T> {
    /// Fails on the first ledger entry instead of skipping it.
    pub fn into_strict(self, path: &Path) -> Result<Vec<T>, FormatError> {
        match self.errors.into_iter().next() {
            Some(e) => Err(FormatError::Row {
                path: path.to_path_buf(),
                line: e.line,
                message: e.message,
            }),
            None => Ok(self.items),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: line {line}: {message}", path.display())]
    Row {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: schema_version {found} is not supported (expected {expected})", path.display())]
    SchemaVersion {
        path: PathBuf,
        found: u64,
        expected: u32,
    },
    #[error("{}: row {row}: expected {expected} feature columns, found {found}", path.display())]
    Dimension {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FormatError + '_ {
    move |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<(), FormatError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, contents).map_err(io_err(path))
}

/// Checks and strips `schema_version`; a missing field counts as `expected`.
pub(crate) fn check_version(
    value: &mut serde_json::Value,
    expected: u32,
) -> Result<(), (u64, String)> {
    let Some(obj) = value.as_object_mut() else {
        return Err((0, "expected a JSON object".into()));
    };
    match obj.remove("schema_version") {
        None => Ok(()),
        Some(v) => match v.as_u64() {
            Some(n) if n == expected as u64 => Ok(()),
            Some(n) => Err((n, format!("schema_version {n} is not supported (expected {expected})"))),
            None => Err((0, "schema_version is not an integer".into())),
        },
    }
}

/// Parses JSON-Lines, one `T` per non-blank line, into a batch.
pub(crate) fn parse_jsonl<T>(
    text: &str,
    expected_version: u32,
    mut convert: impl FnMut(serde_json::Value) -> Result<T, String>,
) -> Batch<T> {
    let mut batch = Batch::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<serde_json::Value>(line)
            .map_err(|e| e.to_string())
            .and_then(|mut v| {
                check_version(&mut v, expected_version).map_err(|(_, m)| m)?;
                convert(v)
            });
        match parsed {
            Ok(item) => batch.items.push(item),
            Err(message) => batch.errors.push(RowError { line: i + 1, message }),
        }
    }
    batch
}

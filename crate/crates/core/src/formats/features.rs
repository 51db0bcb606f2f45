use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_to_string, write_string, Batch, FormatError, RowError};
use crate::rank::{AcousticFeatureVector, Emotion, DEFAULT_FEATURE_DIM};

/// Column layout of a feature CSV. The default matches
/// `utterance_id,speaker_id,emotion,f0..f383`; openSMILE exports with extra
/// leading or trailing columns are read by moving the offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureLayout {
    pub id_col: usize,
    pub speaker_col: usize,
    pub emotion_col: usize,
    pub first_feature_col: usize,
    /// Columns after the feature block (e.g. an ARFF class column).
    pub trailing_cols: usize,
    pub dim: usize,
    pub has_header: bool,
    pub delimiter: char,
}

impl Default for FeatureLayout {
    fn default() -> Self {
        Self {
            id_col: 0,
            speaker_col: 1,
            emotion_col: 2,
            first_feature_col: 3,
            trailing_cols: 0,
            dim: DEFAULT_FEATURE_DIM,
            has_header: true,
            delimiter: ',',
        }
    }
}

impl FeatureLayout {
    pub fn with_dim(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    fn feature_count(&self, columns: usize) -> usize {
        columns.saturating_sub(self.first_feature_col + self.trailing_cols)
    }
}

fn parse_row(
    record: &csv::StringRecord,
    layout: &FeatureLayout,
) -> Result<AcousticFeatureVector<f64>, String> {
    let found = layout.feature_count(record.len());
    if found != layout.dim {
        return Err(format!("expected {} feature columns, found {found}", layout.dim));
    }
    let field = |i: usize, name: &str| {
        record
            .get(i)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing {name} (column {i})"))
    };
    let id = field(layout.id_col, "utterance_id")?;
    let speaker = field(layout.speaker_col, "speaker_id")?;
    let emotion: Emotion = field(layout.emotion_col, "emotion")?
        .parse()
        .map_err(|e| format!("{e}"))?;
    let mut features = Vec::with_capacity(layout.dim);
    for j in 0..layout.dim {
        let col = layout.first_feature_col + j;
        let raw = record.get(col).unwrap_or("").trim();
        let v: f64 = raw
            .parse()
            .map_err(|_| format!("column {col}: `{raw}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("column {col}: non-finite value `{raw}`"));
        }
        features.push(v);
    }
    Ok(AcousticFeatureVector::new(id, speaker, emotion, features))
}

/// Reads a feature CSV. A header whose feature block has the wrong width is
/// fatal; malformed data rows land in the ledger.
pub fn read_features(
    path: &Path,
    layout: &FeatureLayout,
) -> Result<Batch<AcousticFeatureVector<f64>>, FormatError> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(layout.delimiter as u8)
        .from_reader(text.as_bytes());
    let mut batch = Batch::default();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                batch.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if i == 0 && layout.has_header {
            let found = layout.feature_count(record.len());
            if found != layout.dim {
                return Err(FormatError::Dimension {
                    path: path.to_path_buf(),
                    row: line,
                    expected: layout.dim,
                    found,
                });
            }
            continue;
        }
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        match parse_row(&record, layout) {
            Ok(v) => batch.items.push(v),
            Err(message) => batch.errors.push(RowError {
                line,
                message: format!("row {line}: {message}"),
            }),
        }
    }
    Ok(batch)
}

/// Writes the default layout with an `f0..f{d-1}` header.
pub fn write_features(path: &Path, rows: &[AcousticFeatureVector<f64>]) -> Result<(), FormatError> {
    let dim = rows.first().map_or(DEFAULT_FEATURE_DIM, |r| r.dim());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["utterance_id".to_string(), "speaker_id".into(), "emotion".into()];
    header.extend((0..dim).map(|j| format!("f{j}")));
    let csv_err = |e: csv::Error| FormatError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.utterance_id.clone(), r.speaker_id.clone(), r.emotion.to_string()];
        rec.extend(r.features.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| FormatError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_string(path, &String::from_utf8(bytes).expect("csv output is utf-8"))
}

use std::path::Path;

use serde::Serialize;

use super::{check_version, read_to_string, write_string, Batch, FormatError, RowError, REPORT_SCHEMA_VERSION};
use crate::eval::EvalReport;
use crate::rank::AnnotationRow;

fn finish_csv(path: &Path, w: csv::Writer<Vec<u8>>) -> Result<(), FormatError> {
    let bytes = w.into_inner().map_err(|e| FormatError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_string(path, &String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> FormatError + '_ {
    move |e| FormatError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// `utterance_id,speaker,emotion,intensity,bucket`
pub fn write_annotations(path: &Path, rows: &[AnnotationRow<f64>]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["utterance_id", "speaker", "emotion", "intensity", "bucket"])
        .map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.utterance_id.as_str(),
            &r.speaker,
            r.emotion.as_str(),
            &r.intensity.to_string(),
            r.bucket.as_str(),
        ])
        .map_err(csv_err(path))?;
    }
    finish_csv(path, w)
}

pub fn read_annotations(path: &Path) -> Result<Batch<AnnotationRow<f64>>, FormatError> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut batch = Batch::default();
    for (i, rec) in reader.records().enumerate() {
        let parsed = rec.map_err(|e| e.to_string()).and_then(|r| {
            if r.len() != 5 {
                return Err(format!("expected 5 fields, found {}", r.len()));
            }
            Ok(AnnotationRow {
                utterance_id: r[0].to_string(),
                speaker: r[1].to_string(),
                emotion: r[2].parse().map_err(|e| format!("{e}"))?,
                intensity: r[3].parse().map_err(|_| format!("intensity `{}` is not a number", &r[3]))?,
                bucket: r[4].parse().map_err(|e| format!("{e}"))?,
            })
        });
        match parsed {
            Ok(row) => batch.items.push(row),
            Err(message) => batch.errors.push(RowError { line: i + 2, message }),
        }
    }
    Ok(batch)
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a EvalReport,
}

pub fn write_report(path: &Path, report: &EvalReport) -> Result<(), FormatError> {
    let doc = ReportDoc {
        schema_version: REPORT_SCHEMA_VERSION,
        report,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    write_string(path, &s)
}

pub fn read_report(path: &Path) -> Result<EvalReport, FormatError> {
    let text = read_to_string(path)?;
    let parse = |message: String| FormatError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse(e.to_string()))?;
    check_version(&mut value, REPORT_SCHEMA_VERSION).map_err(|(found, message)| {
        if found == 0 {
            parse(message)
        } else {
            FormatError::SchemaVersion {
                path: path.to_path_buf(),
                found,
                expected: REPORT_SCHEMA_VERSION,
            }
        }
    })?;
    serde_json::from_value(value).map_err(|e| parse(e.to_string()))
}

/// Plot-ready CSV: the confusion matrix in long form
/// (`annotated,perceived,count`), MOS groups, or per-utterance values.
pub fn write_report_csv(path: &Path, report: &EvalReport) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = csv_err(path);
    if let Some(cm) = &report.confusion {
        w.write_record(["annotated", "perceived", "count"]).map_err(&e)?;
        for (i, row) in cm.counts.iter().enumerate() {
            for (j, n) in row.iter().enumerate() {
                w.write_record([cm.labels[i].as_str(), &cm.labels[j], &n.to_string()]).map_err(&e)?;
            }
        }
    } else if !report.groups.is_empty() {
        w.write_record(["group", "mean", "count", "std", "ci_low", "ci_high"]).map_err(&e)?;
        for g in &report.groups {
            w.write_record([
                g.key.clone(),
                g.mean.to_string(),
                g.count.to_string(),
                g.std.to_string(),
                g.ci_low.to_string(),
                g.ci_high.to_string(),
            ])
            .map_err(&e)?;
        }
    } else {
        w.write_record(["utterance_id", report.metric.as_str()]).map_err(&e)?;
        for s in &report.per_utterance {
            w.write_record([s.utterance_id.as_str(), &s.value.to_string()]).map_err(&e)?;
        }
    }
    finish_csv(path, w)
}

use std::path::Path;

use serde::Serialize;

use super::{check_version, parse_jsonl, read_to_string, write_string, Batch, FormatError, TRACK_SCHEMA_VERSION};
use crate::prosody::{PhonemeProsody, PitchRange, ProsodyTrack, WordSpan};

#[derive(Serialize)]
struct TrackDoc<'a> {
    schema_version: u32,
    utterance_id: &'a str,
    text: &'a str,
    phonemes: &'a [PhonemeProsody<f64>],
    words: &'a [WordSpan],
    pitch_range: &'a PitchRange<f64>,
}

fn doc(track: &ProsodyTrack<f64>) -> TrackDoc<'_> {
    TrackDoc {
        schema_version: TRACK_SCHEMA_VERSION,
        utterance_id: &track.utterance_id,
        text: &track.text,
        phonemes: &track.phonemes,
        words: &track.words,
        pitch_range: &track.pitch_range,
    }
}

fn from_value(v: serde_json::Value) -> Result<ProsodyTrack<f64>, String> {
    let track: ProsodyTrack<f64> = serde_json::from_value(v).map_err(|e| e.to_string())?;
    track.validate().map_err(|e| e.to_string())?;
    Ok(track)
}

/// Reads a track file: one JSON object, a JSON array, or JSON-Lines.
pub fn read_tracks(path: &Path) -> Result<Batch<ProsodyTrack<f64>>, FormatError> {
    let text = read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let values: Vec<serde_json::Value> = serde_json::from_str(&text).map_err(|e| FormatError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut batch = Batch::default();
        for (i, mut v) in values.into_iter().enumerate() {
            let r = check_version(&mut v, TRACK_SCHEMA_VERSION)
                .map_err(|(_, m)| m)
                .and_then(|_| from_value(v));
            match r {
                Ok(t) => batch.items.push(t),
                Err(message) => batch.errors.push(super::RowError { line: i + 1, message }),
            }
        }
        return Ok(batch);
    }
    // A single pretty-printed object spans several lines.
    if let Ok(mut v) = serde_json::from_str::<serde_json::Value>(&text) {
        if v.is_object() {
            check_version(&mut v, TRACK_SCHEMA_VERSION).map_err(|(found, _)| FormatError::SchemaVersion {
                path: path.to_path_buf(),
                found,
                expected: TRACK_SCHEMA_VERSION,
            })?;
            let mut batch = Batch::default();
            match from_value(v) {
                Ok(t) => batch.items.push(t),
                Err(message) => batch.errors.push(super::RowError { line: 1, message }),
            }
            return Ok(batch);
        }
    }
    Ok(parse_jsonl(&text, TRACK_SCHEMA_VERSION, from_value))
}

/// Reads exactly one track; any rejected row is an error.
pub fn read_track(path: &Path) -> Result<ProsodyTrack<f64>, FormatError> {
    let mut items = read_tracks(path)?.into_strict(path)?;
    if items.len() != 1 {
        return Err(FormatError::Parse {
            path: path.to_path_buf(),
            message: format!("expected one track, found {}", items.len()),
        });
    }
    Ok(items.remove(0))
}

/// Writes one pretty-printed track document.
pub fn write_track(path: &Path, track: &ProsodyTrack<f64>) -> Result<(), FormatError> {
    let mut s = serde_json::to_string_pretty(&doc(track)).expect("track serializes");
    s.push('\n');
    write_string(path, &s)
}

/// Writes tracks as JSON-Lines.
pub fn write_tracks(path: &Path, tracks: &[ProsodyTrack<f64>]) -> Result<(), FormatError> {
    let mut s = String::new();
    for t in tracks {
        s.push_str(&serde_json::to_string(&doc(t)).expect("track serializes"));
        s.push('\n');
    }
    write_string(path, &s)
}

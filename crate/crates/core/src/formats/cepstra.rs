use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{io_err, read_to_string, write_string, FormatError};
use crate::eval::CepstraSequence;

/// JSON sidecar next to a raw little-endian, row-major `T × K` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CepstraSidecar {
    #[serde(rename = "T")]
    pub frames: usize,
    #[serde(rename = "K")]
    pub order: usize,
    /// `f32` or `f64`.
    pub dtype: String,
}

fn parse_err(path: &Path, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn utterance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Reads a `.csv` matrix (optional non-numeric header) or a binary matrix
/// with its `.json` sidecar. The utterance id is the file stem.
pub fn read_cepstra(path: &Path) -> Result<CepstraSequence<f64>, FormatError> {
    let frames = if path.extension().is_some_and(|x| x == "csv") {
        read_csv_frames(path)?
    } else {
        read_bin_frames(path)?
    };
    CepstraSequence::new(utterance_id(path), frames).map_err(|e| parse_err(path, e.to_string()))
}

fn read_csv_frames(path: &Path) -> Result<Vec<Vec<f64>>, FormatError> {
    let text = read_to_string(path)?;
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => frames.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(FormatError::Row {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(frames)
}

fn read_bin_frames(path: &Path) -> Result<Vec<Vec<f64>>, FormatError> {
    let side_path = sidecar_path(path);
    let sidecar: CepstraSidecar = serde_json::from_str(&read_to_string(&side_path)?)
        .map_err(|e| parse_err(&side_path, e.to_string()))?;
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let width = match sidecar.dtype.as_str() {
        "f32" | "float32" => 4,
        "f64" | "float64" => 8,
        other => return Err(parse_err(&side_path, format!("unsupported dtype `{other}`"))),
    };
    let expected = sidecar.frames * sidecar.order * width;
    if bytes.len() != expected {
        return Err(parse_err(
            path,
            format!("{} bytes on disk, sidecar implies {expected}", bytes.len()),
        ));
    }
    let values: Vec<f64> = if width == 4 {
        bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")) as f64)
            .collect()
    } else {
        bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect()
    };
    Ok(values.chunks(sidecar.order.max(1)).map(<[f64]>::to_vec).collect())
}

/// All `.csv` and `.bin` matrices in `dir`, sorted by utterance id.
pub fn read_cepstra_dir(dir: &Path) -> Result<Vec<CepstraSequence<f64>>, FormatError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "bin"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_cepstra(p)).collect()
}

/// Writes `path` as f64 little-endian plus the sidecar.
pub fn write_cepstra_bin(path: &Path, seq: &CepstraSequence<f64>) -> Result<(), FormatError> {
    let bytes: Vec<u8> = seq.frames.iter().flatten().flat_map(|v| v.to_le_bytes()).collect();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, bytes).map_err(io_err(path))?;
    let sidecar = CepstraSidecar {
        frames: seq.len(),
        order: seq.order(),
        dtype: "f64".into(),
    };
    write_string(&sidecar_path(path), &serde_json::to_string(&sidecar).expect("sidecar serializes"))
}

pub fn write_cepstra_csv(path: &Path, seq: &CepstraSequence<f64>) -> Result<(), FormatError> {
    let mut s = (0..seq.order()).map(|k| format!("c{k}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for frame in &seq.frames {
        s.push_str(&frame.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    write_string(path, &s)
}

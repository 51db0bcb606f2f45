//! Objective and subjective evaluation metrics.

mod classify;
mod edit;
mod mcd;
mod mos;
mod report;

pub use classify::{classification_accuracy, pir_confusion, ConfusionMatrix, PirResponse};
pub use edit::{char_tokens, cer, edit_distance, error_rate, wer, word_tokens, ErrorRate};
pub use mcd::{dtw, frame_cost, mcd, mcd_scale, CepstraSequence, McdConfig, McdResult};
pub use mos::{mos_aggregate, MosGroup, MosRating};
pub use report::{Aggregate, EvalReport, UtteranceScore};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("reference is empty; the error rate is undefined")]
    EmptyReference,
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid cepstra: {0}")]
    InvalidCepstra(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("missing column: {0}")]
    MissingColumn(String),
}

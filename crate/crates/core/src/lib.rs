//! Prosody control for emotional speech synthesis: LLM-planned global and
//! word-level scaling of phoneme prosody, per-speaker emotion-intensity
//! ranking, and the evaluation metrics used to judge the result.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file formats and CLI use.

pub mod cli;
pub mod config;
pub mod eval;
pub mod formats;
pub mod prompt;
pub mod prosody;
pub mod rank;
pub mod scalar;
mod warning;

pub use scalar::Scalar;
pub use warning::Warning;

pub type Track = prosody::ProsodyTrack<f64>;
pub type Phoneme = prosody::PhonemeProsody<f64>;
pub type RawPlan = prosody::RawScalingPlan<f64>;
pub type MappedPlan = prosody::MappedScalingPlan<f64>;
pub type Ranges = prosody::ScalingRanges<f64>;
pub type FeatureVector = rank::AcousticFeatureVector<f64>;
pub type Model = rank::RankModel<f64>;
pub type Cepstra = eval::CepstraSequence<f64>;

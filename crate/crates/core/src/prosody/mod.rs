//! Prosody tracks and the global/local scaling applied to them.

mod mapping;
mod plan;
mod scaling;
mod track;

pub use mapping::{Interval, MapOutcome, QuadraticMap, ScalingRanges};
pub use plan::{MappedFactors, MappedScalingPlan, RawFactors, RawScalingPlan, WordFactors};
pub use scaling::{
    apply_scaling, export_durations, map_plan, scale_track, FrameExport, MappedPlanOutcome,
    ScaledTrack,
};
pub use track::{PhonemeProsody, PitchRange, ProsodyTrack, WordSpan};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProsodyError {
    #[error("invalid track {utterance_id}: {reason}")]
    InvalidTrack { utterance_id: String, reason: String },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("utterance {utterance_id}: plan has {found} word entries, track has {expected} words")]
    Alignment {
        utterance_id: String,
        expected: usize,
        found: usize,
    },
}

//! Per-speaker relative emotion-intensity ranking.
//!
//! A linear function `r(x) = W·x` over standardized acoustic features is
//! learned for each (speaker, emotion) from "emotional above neutral" ordered
//! pairs and within-category similar pairs, then min-max normalized to `[0, 1]`
//! over the training utterances.

mod annotate;
mod features;
mod labels;
mod model;
mod pairs;
mod solver;

use std::collections::BTreeSet;

use rayon::prelude::*;

pub use annotate::{
    annotate_corpus, AnnotateOptions, AnnotationError, AnnotationRow, Annotations, ModelSet,
};
pub use features::{AcousticFeatureVector, Standardizer, DEFAULT_FEATURE_DIM};
pub use labels::{Emotion, IntensityLevel, UnknownLabel};
pub use model::{
    bucket, train_model, train_rank, RankConfig, RankFit, RankModel, Thresholds, TrainingMetadata,
};
pub use pairs::{build_pairs, PairSet};
pub use solver::{solve, PairObjective, RankParams, SolverReport};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RankError {
    #[error("cannot train {speaker}/{emotion}: {reason}")]
    Unsatisfiable {
        speaker: String,
        emotion: Emotion,
        reason: String,
    },
    #[error("no ordered pairs to train on")]
    EmptyOrdered,
    #[error("invalid pair set: {0}")]
    InvalidPairs(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
}

/// Outcome of training one (speaker, emotion) slot.
pub type TrainJob<T> = ((String, Emotion), Result<RankModel<T>, RankError>);

/// Every (speaker, non-neutral emotion) present in the corpus, sorted.
pub fn training_keys<T>(corpus: &[AcousticFeatureVector<T>]) -> Vec<(String, Emotion)> {
    let keys: BTreeSet<(String, Emotion)> = corpus
        .iter()
        .filter(|u| u.emotion != Emotion::Neutral)
        .map(|u| (u.speaker_id.clone(), u.emotion))
        .collect();
    keys.into_iter().collect()
}

/// Trains every slot from [`training_keys`] in parallel on the current rayon
/// pool. Results come back in key order.
pub fn train_all<T: Scalar>(
    corpus: &[AcousticFeatureVector<T>],
    cfg: &RankConfig<T>,
) -> Vec<TrainJob<T>> {
    training_keys(corpus)
        .into_par_iter()
        .map(|(speaker, emotion)| {
            let result = train_model(corpus, &speaker, emotion, cfg);
            ((speaker, emotion), result)
        })
        .collect()
}

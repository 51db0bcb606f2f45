use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::features::AcousticFeatureVector;
use super::labels::{Emotion, IntensityLevel};
use super::model::{bucket, RankModel};
use crate::scalar::Scalar;

/// Models keyed by `(speaker, emotion)`; iteration order is deterministic.
pub type ModelSet<T> = BTreeMap<(String, Emotion), RankModel<T>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRow<T> {
    pub utterance_id: String,
    pub speaker: String,
    pub emotion: Emotion,
    pub intensity: T,
    pub bucket: IntensityLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationError {
    pub utterance_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Annotations<T> {
    pub rows: Vec<AnnotationRow<T>>,
    pub errors: Vec<AnnotationError>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnnotateOptions {
    /// Also score neutral utterances under each of their speaker's models.
    pub include_neutral: bool,
}

/// Scores every emotional utterance with its (speaker, emotion) model.
///
/// Missing models and scoring failures become error records; the rest of the
/// corpus is still processed.
pub fn annotate_corpus<T: Scalar>(
    corpus: &[AcousticFeatureVector<T>],
    models: &ModelSet<T>,
    opts: AnnotateOptions,
) -> Annotations<T> {
    let mut out = Annotations {
        rows: Vec::new(),
        errors: Vec::new(),
    };
    for utt in corpus {
        let candidates: Vec<&RankModel<T>> = if utt.emotion == Emotion::Neutral {
            if !opts.include_neutral {
                continue;
            }
            models
                .iter()
                .filter(|((spk, _), _)| *spk == utt.speaker_id)
                .map(|(_, m)| m)
                .collect()
        } else {
            models
                .get(&(utt.speaker_id.clone(), utt.emotion))
                .into_iter()
                .collect()
        };
        if candidates.is_empty() {
            out.errors.push(AnnotationError {
                utterance_id: utt.utterance_id.clone(),
                message: format!("no model for speaker {} / {}", utt.speaker_id, utt.emotion),
            });
            continue;
        }
        for model in candidates {
            match model.score(utt) {
                Ok(intensity) => out.rows.push(AnnotationRow {
                    utterance_id: utt.utterance_id.clone(),
                    speaker: utt.speaker_id.clone(),
                    emotion: model.emotion,
                    intensity,
                    bucket: bucket(intensity, &model.thresholds),
                }),
                Err(e) => out.errors.push(AnnotationError {
                    utterance_id: utt.utterance_id.clone(),
                    message: e.to_string(),
                }),
            }
        }
    }
    out
}

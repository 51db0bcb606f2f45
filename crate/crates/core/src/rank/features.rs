use serde::{Deserialize, Serialize};

use super::labels::Emotion;
use crate::scalar::Scalar;

/// Default dimensionality of utterance-level openSMILE statistics.
pub const DEFAULT_FEATURE_DIM: usize = 384;

/// Utterance-level acoustic features with their corpus metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticFeatureVector<T> {
    pub utterance_id: String,
    pub speaker_id: String,
    pub emotion: Emotion,
    pub features: Vec<T>,
}

impl<T: Scalar> AcousticFeatureVector<T> {
    pub fn new(
        utterance_id: impl Into<String>,
        speaker_id: impl Into<String>,
        emotion: Emotion,
        features: Vec<T>,
    ) -> Self {
        Self {
            utterance_id: utterance_id.into(),
            speaker_id: speaker_id.into(),
            emotion,
            features,
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn all_finite(&self) -> bool {
        self.features.iter().all(|v| v.is_finite())
    }
}

/// Per-dimension z-scoring; zero-variance dimensions keep a unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    /// Population mean and standard deviation over `rows`. Panics on empty input.
    pub fn fit(rows: &[Vec<T>]) -> Self {
        assert!(!rows.is_empty(), "cannot standardize zero rows");
        let dim = rows[0].len();
        let n = T::of_usize(rows.len());
        let mut mean = vec![T::zero(); dim];
        for row in rows {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![T::zero(); dim];
        for row in rows {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd.is_finite() && sd > T::epsilon() {
                    sd
                } else {
                    T::one()
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }
}

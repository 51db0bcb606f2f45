use serde::{Deserialize, Serialize};

use super::features::{AcousticFeatureVector, Standardizer};
use super::labels::{Emotion, IntensityLevel};
use super::pairs::{build_pairs, PairSet};
use super::solver::{solve, RankParams};
use super::RankError;
use crate::scalar::{dot, Scalar};

/// Bucket boundaries on the normalized intensity scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    pub low: T,
    pub high: T,
}

impl<T: Scalar> Thresholds<T> {
    pub fn new(low: T, high: T) -> Result<Self, RankError> {
        if !(low >= T::zero() && low < high && high <= T::one()) {
            return Err(RankError::InvalidThresholds(format!(
                "need 0 <= low < high <= 1, got ({low}, {high})"
            )));
        }
        Ok(Self { low, high })
    }

    /// Equal thirds of the unit interval.
    pub fn thirds() -> Self {
        let three = T::of(3.0);
        Self {
            low: T::one() / three,
            high: (T::one() + T::one()) / three,
        }
    }

    /// Empirical tertiles (linear interpolation between order statistics).
    /// Falls back to [`Thresholds::thirds`] when the sample cannot separate three levels.
    pub fn tertiles(scores: &[T]) -> Self {
        let mut v: Vec<T> = scores.iter().copied().filter(|s| s.is_finite()).collect();
        if v.len() < 3 {
            return Self::thirds();
        }
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let q = |p: f64| {
            let h = T::of((v.len() - 1) as f64 * p);
            let lo = h.floor();
            let i = lo.to_usize().unwrap_or(0).min(v.len() - 1);
            let j = (i + 1).min(v.len() - 1);
            v[i] + (h - lo) * (v[j] - v[i])
        };
        let low = q(1.0 / 3.0).clamp_to(T::zero(), T::one());
        let high = q(2.0 / 3.0).clamp_to(T::zero(), T::one());
        Self::new(low, high).unwrap_or_else(|_| Self::thirds())
    }
}

/// Places a normalized intensity into Low / Medium / High.
pub fn bucket<T: Scalar>(intensity: T, thresholds: &Thresholds<T>) -> IntensityLevel {
    if intensity < thresholds.low {
        IntensityLevel::Low
    } else if intensity < thresholds.high {
        IntensityLevel::Medium
    } else {
        IntensityLevel::High
    }
}

/// Output of [`train_rank`]: the linear ranker in standardized feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFit<T> {
    pub weights: Vec<T>,
    pub standardizer: Standardizer<T>,
    pub score_min: T,
    pub score_max: T,
    /// Normalized score of every training row, in row order.
    pub training_scores: Vec<T>,
    pub objective: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Fits `r(x) = W·standardize(x)` on `features` under `pairs`.
///
/// Standardization and the score range both come from all rows of `features`.
pub fn train_rank<T: Scalar>(
    features: &[Vec<T>],
    pairs: &PairSet,
    params: &RankParams<T>,
) -> Result<RankFit<T>, RankError> {
    if !(params.c.is_finite() && params.c > T::zero()) || !(params.tolerance >= T::zero()) {
        return Err(RankError::InvalidParams(format!(
            "C = {} must be positive and tolerance = {} non-negative",
            params.c, params.tolerance
        )));
    }
    if pairs.ordered.is_empty() {
        return Err(RankError::EmptyOrdered);
    }
    pairs.validate(features.len())?;
    let dim = features[0].len();
    if dim == 0 {
        return Err(RankError::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(row) = features.iter().find(|r| r.len() != dim) {
        return Err(RankError::DimensionMismatch {
            expected: dim,
            found: row.len(),
        });
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(RankError::NumericalFailure("non-finite feature value".into()));
    }

    let standardizer = Standardizer::fit(features);
    let rows: Vec<Vec<T>> = features.iter().map(|r| standardizer.transform(r)).collect();
    let report = solve(&rows, pairs, params);
    if !report.objective.is_finite() || report.weights.iter().any(|w| !w.is_finite()) {
        return Err(RankError::NumericalFailure(format!(
            "objective became {}",
            report.objective
        )));
    }

    let raw: Vec<T> = rows.iter().map(|r| dot(r, &report.weights)).collect();
    let score_min = raw.iter().copied().fold(T::infinity(), T::min);
    let score_max = raw.iter().copied().fold(T::neg_infinity(), T::max);
    if !(score_max - score_min > T::epsilon() * (T::one() + score_max.abs())) {
        return Err(RankError::NumericalFailure(
            "trained ranker assigns every training utterance the same score".into(),
        ));
    }
    let training_scores = raw
        .iter()
        .map(|&s| normalize(s, score_min, score_max))
        .collect();

    Ok(RankFit {
        weights: report.weights,
        standardizer,
        score_min,
        score_max,
        training_scores,
        objective: report.objective,
        grad_norm: report.grad_norm,
        iterations: report.iterations,
        converged: report.converged,
    })
}

fn normalize<T: Scalar>(raw: T, min: T, max: T) -> T {
    ((raw - min) / (max - min)).clamp_to(T::zero(), T::one())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata<T> {
    pub ordered_pairs: usize,
    pub similar_pairs: usize,
    pub training_utterances: usize,
    pub final_objective: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub pair_limit: usize,
    pub seed: u64,
}

/// A trained intensity ranker for one (speaker, emotion).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankModel<T> {
    pub speaker: String,
    pub emotion: Emotion,
    #[serde(rename = "W")]
    pub weights: Vec<T>,
    #[serde(rename = "mean")]
    pub feature_mean: Vec<T>,
    #[serde(rename = "std")]
    pub feature_std: Vec<T>,
    pub score_min: T,
    pub score_max: T,
    /// Default bucket boundaries: tertiles of the emotional training utterances.
    pub thresholds: Thresholds<T>,
    pub hyperparams: RankParams<T>,
    pub metadata: TrainingMetadata<T>,
}

impl<T: Scalar> RankModel<T> {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn raw_score(&self, features: &[T]) -> Result<T, RankError> {
        if features.len() != self.dim() {
            return Err(RankError::DimensionMismatch {
                expected: self.dim(),
                found: features.len(),
            });
        }
        Ok(features
            .iter()
            .zip(&self.feature_mean)
            .zip(&self.feature_std)
            .zip(&self.weights)
            .map(|(((&x, &m), &s), &w)| (x - m) / s * w)
            .sum())
    }

    /// Normalized intensity in `[0, 1]`.
    pub fn score(&self, x: &AcousticFeatureVector<T>) -> Result<T, RankError> {
        self.score_features(&x.features)
    }

    pub fn score_features(&self, features: &[T]) -> Result<T, RankError> {
        let raw = self.raw_score(features)?;
        if !raw.is_finite() {
            return Err(RankError::NumericalFailure("non-finite score".into()));
        }
        Ok(normalize(raw, self.score_min, self.score_max))
    }

    pub fn validate(&self) -> Result<(), RankError> {
        let d = self.dim();
        if self.feature_mean.len() != d || self.feature_std.len() != d {
            return Err(RankError::DimensionMismatch {
                expected: d,
                found: self.feature_mean.len().min(self.feature_std.len()),
            });
        }
        if !(self.score_min < self.score_max) {
            return Err(RankError::NumericalFailure(format!(
                "score range [{}, {}] is empty",
                self.score_min, self.score_max
            )));
        }
        if self.feature_std.iter().any(|s| !(*s > T::zero())) {
            return Err(RankError::NumericalFailure("non-positive feature std".into()));
        }
        Thresholds::new(self.thresholds.low, self.thresholds.high)?;
        Ok(())
    }
}

/// Pair construction and solver settings for [`train_model`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankConfig<T> {
    pub params: RankParams<T>,
    pub pair_limit: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for RankConfig<T> {
    fn default() -> Self {
        Self {
            params: RankParams::default(),
            pair_limit: 10_000,
            seed: 0,
        }
    }
}

/// Trains the ranker for `emotion` of `speaker` from that speaker's emotional
/// and neutral utterances only.
pub fn train_model<T: Scalar>(
    corpus: &[AcousticFeatureVector<T>],
    speaker: &str,
    emotion: Emotion,
    cfg: &RankConfig<T>,
) -> Result<RankModel<T>, RankError> {
    let subset: Vec<AcousticFeatureVector<T>> = corpus
        .iter()
        .filter(|u| u.speaker_id == speaker && (u.emotion == emotion || u.emotion == Emotion::Neutral))
        .cloned()
        .collect();
    let pairs = build_pairs(&subset, speaker, emotion, cfg.pair_limit, cfg.seed)?;
    let features: Vec<Vec<T>> = subset.iter().map(|u| u.features.clone()).collect();
    let fit = train_rank(&features, &pairs, &cfg.params).map_err(|e| match e {
        RankError::NumericalFailure(m) => {
            RankError::NumericalFailure(format!("{speaker}/{emotion}: {m}"))
        }
        other => other,
    })?;
    let emotional: Vec<T> = subset
        .iter()
        .zip(&fit.training_scores)
        .filter(|(u, _)| u.emotion == emotion)
        .map(|(_, &s)| s)
        .collect();

    Ok(RankModel {
        speaker: speaker.to_string(),
        emotion,
        thresholds: Thresholds::tertiles(&emotional),
        weights: fit.weights,
        feature_mean: fit.standardizer.mean,
        feature_std: fit.standardizer.std,
        score_min: fit.score_min,
        score_max: fit.score_max,
        hyperparams: cfg.params,
        metadata: TrainingMetadata {
            ordered_pairs: pairs.ordered.len(),
            similar_pairs: pairs.similar.len(),
            training_utterances: subset.len(),
            final_objective: fit.objective,
            grad_norm: fit.grad_norm,
            iterations: fit.iterations,
            converged: fit.converged,
            pair_limit: cfg.pair_limit,
            seed: cfg.seed,
        },
    })
}

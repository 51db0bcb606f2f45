use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Raw pitch/energy/duration values as produced by the language model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RawFactors<T> {
    pub pitch: T,
    pub energy: T,
    pub duration: T,
}

impl<T: Scalar> RawFactors<T> {
    pub fn zero() -> Self {
        Self {
            pitch: T::zero(),
            energy: T::zero(),
            duration: T::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pitch == T::zero() && self.energy == T::zero() && self.duration == T::zero()
    }
}

/// Raw factors attached to one word of the utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordFactors<T> {
    pub word: String,
    pub pitch: T,
    pub energy: T,
    pub duration: T,
}

impl<T: Scalar> WordFactors<T> {
    pub fn neutral(word: impl Into<String>) -> Self {
        Self::new(word, RawFactors::zero())
    }

    pub fn new(word: impl Into<String>, f: RawFactors<T>) -> Self {
        Self {
            word: word.into(),
            pitch: f.pitch,
            energy: f.energy,
            duration: f.duration,
        }
    }

    pub fn factors(&self) -> RawFactors<T> {
        RawFactors {
            pitch: self.pitch,
            energy: self.energy,
            duration: self.duration,
        }
    }
}

/// Global and per-word factors in language-model units
/// (pitch/energy in `[-5, 5]`, duration in `[-2, 2]` by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawScalingPlan<T> {
    pub global: RawFactors<T>,
    #[serde(rename = "words")]
    pub locals: Vec<WordFactors<T>>,
    /// The model's free-text reasoning, when it gave one.
    #[serde(
        rename = "reasoning",
        alias = "rationale",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub rationale: Option<String>,
}

impl<T: Scalar> RawScalingPlan<T> {
    /// The all-zero plan for the given words; maps to the identity transform.
    pub fn neutral<S: AsRef<str>>(words: &[S]) -> Self {
        Self {
            global: RawFactors::zero(),
            locals: words.iter().map(|w| WordFactors::neutral(w.as_ref())).collect(),
            rationale: None,
        }
    }

    pub fn is_neutral(&self) -> bool {
        self.global.is_zero() && self.locals.iter().all(|w| w.factors().is_zero())
    }

    /// Same plan with the global triple forced to zero.
    pub fn local_only(mut self) -> Self {
        self.global = RawFactors::zero();
        self
    }

    /// Same plan with all local triples forced to zero.
    pub fn global_only(mut self) -> Self {
        for w in &mut self.locals {
            w.pitch = T::zero();
            w.energy = T::zero();
            w.duration = T::zero();
        }
        self
    }
}

/// Factors after range mapping: multiplicative duration/energy, additive pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappedFactors<T> {
    pub duration: T,
    pub energy: T,
    pub pitch_offset: T,
}

impl<T: Scalar> MappedFactors<T> {
    pub fn neutral() -> Self {
        Self {
            duration: T::one(),
            energy: T::one(),
            pitch_offset: T::zero(),
        }
    }
}

/// A plan ready to be applied to a track: one local triple per word span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedScalingPlan<T> {
    pub global: MappedFactors<T>,
    pub locals: Vec<MappedFactors<T>>,
}

impl<T: Scalar> MappedScalingPlan<T> {
    pub fn neutral(words: usize) -> Self {
        Self {
            global: MappedFactors::neutral(),
            locals: vec![MappedFactors::neutral(); words],
        }
    }
}

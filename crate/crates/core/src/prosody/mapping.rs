//! Range maps from language-model units onto scaling factors.

use serde::{Deserialize, Serialize};

use super::ProsodyError;
use crate::scalar::Scalar;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, ProsodyError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ProsodyError::InvalidRange(format!(
                "interval [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn clamp(&self, v: T) -> T {
        v.clamp_to(self.lo, self.hi)
    }
}

/// Result of pushing one raw value through a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOutcome<T> {
    pub value: T,
    /// The input fell outside the raw range and was clamped first.
    pub clamped: bool,
}

/// `f(v) = a·v² + b·v + c` through `f(lo_r) = lo_t`, `f(0) = 1`, `f(hi_r) = hi_t`.
///
/// The raw range must be symmetric about zero and the target must straddle 1,
/// so a raw value of zero always means "leave unchanged".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticMap<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub raw: Interval<T>,
    pub target: Interval<T>,
}

impl<T: Scalar> QuadraticMap<T> {
    pub fn fit(raw: Interval<T>, target: Interval<T>) -> Result<Self, ProsodyError> {
        let zero = T::zero();
        let one = T::one();
        let two = one + one;
        if !(raw.lo < zero && raw.hi > zero && raw.lo == -raw.hi) {
            return Err(ProsodyError::InvalidMap(format!(
                "raw range [{}, {}] must be symmetric about 0",
                raw.lo, raw.hi
            )));
        }
        if !(target.lo < one && one < target.hi) {
            return Err(ProsodyError::InvalidMap(format!(
                "target range [{}, {}] must contain 1 in its interior",
                target.lo, target.hi
            )));
        }
        let h = raw.hi;
        let a = (target.hi + target.lo - two) / (two * h * h);
        let b = (target.hi - target.lo) / (two * h);
        // f'(v) = 2av + b must stay positive on [-h, h].
        if (two * a * h).abs() >= b {
            return Err(ProsodyError::InvalidMap(format!(
                "map onto [{}, {}] is not monotone over [-{h}, {h}]",
                target.lo, target.hi
            )));
        }
        Ok(Self { a, b, c: one, raw, target })
    }

    /// Evaluates the polynomial without clamping.
    pub fn polynomial(&self, v: T) -> T {
        (self.a * v + self.b) * v + self.c
    }

    pub fn map(&self, v: T) -> MapOutcome<T> {
        let clamped = !self.raw.contains(v);
        let x = self.raw.clamp(v);
        MapOutcome {
            // Endpoint evaluation can land one ulp outside the target.
            value: self.target.clamp(self.polynomial(x)),
            clamped,
        }
    }
}

/// Configured ranges for the three prosody dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRanges<T> {
    pub duration_raw: Interval<T>,
    pub duration_target: Interval<T>,
    pub energy_raw: Interval<T>,
    pub energy_target: Interval<T>,
    pub pitch_raw: Interval<T>,
    /// Multiplier on the full-scale pitch offset of `±(p_max − p_min)/2`.
    pub pitch_gain: T,
}

impl<T: Scalar> Default for ScalingRanges<T> {
    fn default() -> Self {
        let iv = |lo: f64, hi: f64| Interval {
            lo: T::of(lo),
            hi: T::of(hi),
        };
        Self {
            duration_raw: iv(-2.0, 2.0),
            duration_target: iv(0.74, 1.34),
            energy_raw: iv(-5.0, 5.0),
            energy_target: iv(0.5, 2.0),
            pitch_raw: iv(-5.0, 5.0),
            pitch_gain: T::one(),
        }
    }
}

impl<T: Scalar> ScalingRanges<T> {
    pub fn duration_map(&self) -> Result<QuadraticMap<T>, ProsodyError> {
        QuadraticMap::fit(self.duration_raw, self.duration_target)
    }

    pub fn energy_map(&self) -> Result<QuadraticMap<T>, ProsodyError> {
        QuadraticMap::fit(self.energy_raw, self.energy_target)
    }

    pub fn validate(&self) -> Result<(), ProsodyError> {
        self.duration_map()?;
        self.energy_map()?;
        Interval::new(self.pitch_raw.lo, self.pitch_raw.hi)?;
        if self.pitch_raw.lo != -self.pitch_raw.hi {
            return Err(ProsodyError::InvalidMap(format!(
                "pitch raw range [{}, {}] must be symmetric about 0",
                self.pitch_raw.lo, self.pitch_raw.hi
            )));
        }
        if !(self.pitch_gain.is_finite() && self.pitch_gain > T::zero()) {
            return Err(ProsodyError::InvalidMap(format!(
                "pitch_gain {} must be positive",
                self.pitch_gain
            )));
        }
        Ok(())
    }

    /// Linear map of a raw pitch value onto an additive offset.
    pub fn pitch_offset(&self, v: T, span: T) -> MapOutcome<T> {
        let two = T::one() + T::one();
        let clamped = !self.pitch_raw.contains(v);
        let x = self.pitch_raw.clamp(v);
        MapOutcome {
            value: x / self.pitch_raw.hi * (span / two) * self.pitch_gain,
            clamped,
        }
    }
}

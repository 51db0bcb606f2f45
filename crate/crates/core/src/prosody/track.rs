use serde::{Deserialize, Serialize};

use super::ProsodyError;
use crate::scalar::Scalar;

/// Per-phoneme variance-adaptor outputs.
///
/// `duration` is a linear frame count, `energy` and `pitch` are in the
/// predictor's normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhonemeProsody<T> {
    pub symbol: String,
    pub duration: T,
    pub energy: T,
    pub pitch: T,
}

/// Inclusive phoneme index range covered by one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpan {
    pub word: String,
    #[serde(rename = "first")]
    pub first_phoneme: usize,
    #[serde(rename = "last")]
    pub last_phoneme: usize,
}

impl WordSpan {
    pub fn new(word: impl Into<String>, first_phoneme: usize, last_phoneme: usize) -> Self {
        Self {
            word: word.into(),
            first_phoneme,
            last_phoneme,
        }
    }

    pub fn phonemes(&self) -> std::ops::RangeInclusive<usize> {
        self.first_phoneme..=self.last_phoneme
    }

    pub fn len(&self) -> usize {
        self.last_phoneme + 1 - self.first_phoneme
    }

    pub fn is_empty(&self) -> bool {
        self.last_phoneme < self.first_phoneme
    }
}

/// Minimum and maximum pitch the predictor produced for an utterance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchRange<T> {
    #[serde(rename = "min")]
    pub p_min: T,
    #[serde(rename = "max")]
    pub p_max: T,
}

impl<T: Scalar> PitchRange<T> {
    pub fn new(p_min: T, p_max: T) -> Result<Self, ProsodyError> {
        let range = Self { p_min, p_max };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<(), ProsodyError> {
        if !self.p_min.is_finite() || !self.p_max.is_finite() || self.p_min >= self.p_max {
            return Err(ProsodyError::InvalidRange(format!(
                "pitch range [{}, {}] must be finite with min < max",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    pub fn span(&self) -> T {
        self.p_max - self.p_min
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.p_min && v <= self.p_max
    }
}

/// Phoneme-level prosody for one utterance, grouped into words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProsodyTrack<T> {
    pub utterance_id: String,
    pub text: String,
    pub phonemes: Vec<PhonemeProsody<T>>,
    pub words: Vec<WordSpan>,
    pub pitch_range: PitchRange<T>,
}

impl<T: Scalar> ProsodyTrack<T> {
    /// Builds a track and checks every structural invariant.
    pub fn new(
        utterance_id: impl Into<String>,
        text: impl Into<String>,
        phonemes: Vec<PhonemeProsody<T>>,
        words: Vec<WordSpan>,
        pitch_range: PitchRange<T>,
    ) -> Result<Self, ProsodyError> {
        let track = Self {
            utterance_id: utterance_id.into(),
            text: text.into(),
            phonemes,
            words,
            pitch_range,
        };
        track.validate()?;
        Ok(track)
    }

    pub fn validate(&self) -> Result<(), ProsodyError> {
        let bad = |reason: String| ProsodyError::InvalidTrack {
            utterance_id: self.utterance_id.clone(),
            reason,
        };
        self.pitch_range
            .validate()
            .map_err(|e| bad(e.to_string()))?;
        if self.phonemes.is_empty() {
            return Err(bad("track has no phonemes".into()));
        }
        for (i, ph) in self.phonemes.iter().enumerate() {
            if !(ph.duration.is_finite() && ph.duration > T::zero()) {
                return Err(bad(format!("phoneme {i}: duration {} is not > 0", ph.duration)));
            }
            if !(ph.energy.is_finite() && ph.energy > T::zero()) {
                return Err(bad(format!("phoneme {i}: energy {} is not > 0", ph.energy)));
            }
            if !ph.pitch.is_finite() {
                return Err(bad(format!("phoneme {i}: pitch is not finite")));
            }
        }
        // Word spans must tile 0..n in order.
        let mut next = 0usize;
        for (w, span) in self.words.iter().enumerate() {
            if span.first_phoneme > span.last_phoneme {
                return Err(bad(format!("word {w} ({}) is empty", span.word)));
            }
            if span.first_phoneme != next {
                return Err(bad(format!(
                    "word {w} ({}) starts at phoneme {}, expected {next}",
                    span.word, span.first_phoneme
                )));
            }
            if span.last_phoneme >= self.phonemes.len() {
                return Err(bad(format!(
                    "word {w} ({}) ends at phoneme {} beyond {} phonemes",
                    span.word,
                    span.last_phoneme,
                    self.phonemes.len()
                )));
            }
            next = span.last_phoneme + 1;
        }
        if next != self.phonemes.len() {
            return Err(bad(format!(
                "word spans cover {next} of {} phonemes",
                self.phonemes.len()
            )));
        }
        Ok(())
    }

    pub fn word_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| w.word.clone()).collect()
    }

    /// Converts every prosody value to another scalar type.
    pub fn cast<U: Scalar>(&self) -> ProsodyTrack<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        ProsodyTrack {
            utterance_id: self.utterance_id.clone(),
            text: self.text.clone(),
            phonemes: self
                .phonemes
                .iter()
                .map(|p| PhonemeProsody {
                    symbol: p.symbol.clone(),
                    duration: c(p.duration),
                    energy: c(p.energy),
                    pitch: c(p.pitch),
                })
                .collect(),
            words: self.words.clone(),
            pitch_range: PitchRange {
                p_min: c(self.pitch_range.p_min),
                p_max: c(self.pitch_range.p_max),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ph(d: f64) -> PhonemeProsody<f64> {
        PhonemeProsody {
            symbol: "AH".into(),
            duration: d,
            energy: 1.0,
            pitch: 0.0,
        }
    }

    fn range() -> PitchRange<f64> {
        PitchRange::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn accepts_partition() {
        let t = ProsodyTrack::new(
            "u1",
            "hi there",
            vec![ph(3.0), ph(4.0), ph(5.0)],
            vec![WordSpan::new("hi", 0, 0), WordSpan::new("there", 1, 2)],
            range(),
        );
        assert!(t.is_ok());
    }

    #[test]
    fn rejects_gap_overlap_and_short_cover() {
        let phs = vec![ph(3.0), ph(4.0), ph(5.0)];
        let gap = vec![WordSpan::new("a", 0, 0), WordSpan::new("b", 2, 2)];
        let overlap = vec![WordSpan::new("a", 0, 1), WordSpan::new("b", 1, 2)];
        let short = vec![WordSpan::new("a", 0, 1)];
        let past_end = vec![WordSpan::new("a", 0, 3)];
        let inverted = vec![WordSpan::new("a", 0, 0), WordSpan::new("b", 2, 1)];
        for words in [gap, overlap, short, past_end, inverted] {
            assert!(ProsodyTrack::new("u", "", phs.clone(), words, range()).is_err());
        }
    }

    #[test]
    fn rejects_bad_phoneme_values() {
        let words = vec![WordSpan::new("a", 0, 0)];
        let mut p = ph(0.0);
        assert!(ProsodyTrack::new("u", "", vec![p.clone()], words.clone(), range()).is_err());
        p.duration = 1.0;
        p.energy = -0.1;
        assert!(ProsodyTrack::new("u", "", vec![p.clone()], words.clone(), range()).is_err());
        p.energy = 1.0;
        p.pitch = f64::INFINITY;
        assert!(ProsodyTrack::new("u", "", vec![p], words, range()).is_err());
    }

    #[test]
    fn pitch_range_requires_order() {
        assert!(PitchRange::new(1.0, 1.0).is_err());
        assert!(PitchRange::new(2.0, 1.0).is_err());
        assert!(PitchRange::new(f64::NAN, 1.0).is_err());
    }
}

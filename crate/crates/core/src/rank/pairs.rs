use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::AcousticFeatureVector;
use super::labels::Emotion;
use super::RankError;

/// Training constraints for one ranker, as indices into a feature list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairSet {
    /// `(hi, lo)`: `hi` is strictly more intense than `lo`.
    pub ordered: Vec<(usize, usize)>,
    /// `(i, j)`: same perceived intensity.
    pub similar: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn validate(&self, n: usize) -> Result<(), RankError> {
        let bad = |msg: String| Err(RankError::InvalidPairs(msg));
        for &(a, b) in self.ordered.iter().chain(&self.similar) {
            if a >= n || b >= n {
                return bad(format!("pair ({a}, {b}) out of range for {n} rows"));
            }
            if a == b {
                return bad(format!("self pair ({a}, {a})"));
            }
        }
        let key = |&(a, b): &(usize, usize)| (a.min(b), a.max(b));
        let ordered: std::collections::BTreeSet<_> = self.ordered.iter().map(key).collect();
        if let Some(p) = self.similar.iter().map(key).find(|p| ordered.contains(p)) {
            return bad(format!("pair {p:?} is both ordered and similar"));
        }
        Ok(())
    }
}

/// Ordered (emotional over neutral) and similar (within-category) pairs for
/// one speaker and emotion, each capped at `limit` by seeded sampling.
///
/// Indices refer to positions in `corpus`.
pub fn build_pairs<T>(
    corpus: &[AcousticFeatureVector<T>],
    speaker: &str,
    emotion: Emotion,
    limit: usize,
    seed: u64,
) -> Result<PairSet, RankError> {
    if emotion == Emotion::Neutral {
        return Err(RankError::Unsatisfiable {
            speaker: speaker.to_string(),
            emotion,
            reason: "neutral is the reference category, not a ranked emotion".into(),
        });
    }
    let of = |e: Emotion| -> Vec<usize> {
        corpus
            .iter()
            .enumerate()
            .filter(|(_, u)| u.speaker_id == speaker && u.emotion == e)
            .map(|(i, _)| i)
            .collect()
    };
    let emotional = of(emotion);
    let neutral = of(Emotion::Neutral);
    if emotional.is_empty() || neutral.is_empty() {
        return Err(RankError::Unsatisfiable {
            speaker: speaker.to_string(),
            emotion,
            reason: format!(
                "{} {emotion} and {} neutral utterances",
                emotional.len(),
                neutral.len()
            ),
        });
    }

    let ordered: Vec<(usize, usize)> = emotional
        .iter()
        .flat_map(|&e| neutral.iter().map(move |&n| (e, n)))
        .collect();
    let mut similar = within_pairs(&neutral);
    similar.extend(within_pairs(&emotional));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(PairSet {
        ordered: subsample(ordered, limit, &mut rng),
        similar: subsample(similar, limit, &mut rng),
    })
}

fn within_pairs(idx: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            out.push((i, j));
        }
    }
    out
}

fn subsample<P: Copy>(items: Vec<P>, limit: usize, rng: &mut ChaCha8Rng) -> Vec<P> {
    if items.len() <= limit {
        return items;
    }
    let mut keep = index::sample(rng, items.len(), limit).into_vec();
    keep.sort_unstable();
    keep.into_iter().map(|i| items[i]).collect()
}

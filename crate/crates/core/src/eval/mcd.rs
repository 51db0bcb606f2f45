//! Mel cepstral distortion with optional dynamic time warping.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::scalar::Scalar;

/// `T × K` mel-cepstral frames; coefficient 0 is the energy term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CepstraSequence<T> {
    pub utterance_id: String,
    pub frames: Vec<Vec<T>>,
}

impl<T: Scalar> CepstraSequence<T> {
    pub fn new(utterance_id: impl Into<String>, frames: Vec<Vec<T>>) -> Result<Self, EvalError> {
        let s = Self {
            utterance_id: utterance_id.into(),
            frames,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::InvalidCepstra(format!("{}: {m}", self.utterance_id)));
        if self.frames.is_empty() {
            return bad("no frames".into());
        }
        let k = self.frames[0].len();
        if k < 2 {
            return bad(format!("{k} coefficients, need at least 2"));
        }
        for (t, f) in self.frames.iter().enumerate() {
            if f.len() != k {
                return bad(format!("frame {t} has {} coefficients, expected {k}", f.len()));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return bad(format!("frame {t} has a non-finite coefficient"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn order(&self) -> usize {
        self.frames.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McdConfig {
    /// Leave coefficient 0 (energy) out of the distance.
    pub exclude_c0: bool,
    /// Align with DTW; otherwise frames are compared one-to-one.
    pub dtw: bool,
}

impl Default for McdConfig {
    fn default() -> Self {
        Self {
            exclude_c0: true,
            dtw: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McdResult<T> {
    /// Distortion in dB.
    pub mcd: T,
    /// Aligned `(i, j)` frame pairs from `(0, 0)` to `(T_a − 1, T_b − 1)`.
    pub path: Vec<(usize, usize)>,
    /// Sum of per-pair costs along `path`.
    pub total_cost: T,
}

/// `(10 / ln 10) · √2`
pub fn mcd_scale<T: Scalar>() -> T {
    T::of(10.0) / T::of(10.0).ln() * T::of(2.0).sqrt()
}

/// Euclidean distance over coefficients `k0..K`.
pub fn frame_cost<T: Scalar>(a: &[T], b: &[T], k0: usize) -> T {
    a[k0..]
        .iter()
        .zip(&b[k0..])
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Minimum-total-cost monotone alignment with steps (1,0), (0,1), (1,1),
/// anchored at both corners. Ties prefer the diagonal.
pub fn dtw<T: Scalar>(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> T) -> (T, Vec<(usize, usize)>) {
    assert!(rows > 0 && cols > 0, "dtw needs non-empty sequences");
    let inf = T::infinity();
    let mut acc = vec![inf; rows * cols];
    let at = |i: usize, j: usize| i * cols + j;
    for i in 0..rows {
        for j in 0..cols {
            let c = cost(i, j);
            let best = if i == 0 && j == 0 {
                T::zero()
            } else {
                let diag = if i > 0 && j > 0 { acc[at(i - 1, j - 1)] } else { inf };
                let up = if i > 0 { acc[at(i - 1, j)] } else { inf };
                let left = if j > 0 { acc[at(i, j - 1)] } else { inf };
                diag.min(up).min(left)
            };
            acc[at(i, j)] = best + c;
        }
    }
    let mut path = vec![(rows - 1, cols - 1)];
    let (mut i, mut j) = (rows - 1, cols - 1);
    while (i, j) != (0, 0) {
        let step = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = acc[at(i - 1, j - 1)];
            let up = acc[at(i - 1, j)];
            let left = acc[at(i, j - 1)];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        (i, j) = step;
        path.push(step);
    }
    path.reverse();
    (acc[at(rows - 1, cols - 1)], path)
}

/// Mel cepstral distortion between two sequences.
///
/// `MCD = (10 / ln 10) · √2 · mean(frame_cost)` over the aligned pairs.
pub fn mcd<T: Scalar>(
    a: &CepstraSequence<T>,
    b: &CepstraSequence<T>,
    cfg: McdConfig,
) -> Result<McdResult<T>, EvalError> {
    a.validate()?;
    b.validate()?;
    if a.order() != b.order() {
        return Err(EvalError::LengthMismatch(format!(
            "coefficient count {} vs {}",
            a.order(),
            b.order()
        )));
    }
    let k0 = usize::from(cfg.exclude_c0);
    let cost = |i: usize, j: usize| frame_cost(&a.frames[i], &b.frames[j], k0);
    let (total_cost, path) = if cfg.dtw {
        dtw(a.len(), b.len(), cost)
    } else {
        if a.len() != b.len() {
            return Err(EvalError::LengthMismatch(format!(
                "frame-synchronous MCD needs equal lengths, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let path: Vec<(usize, usize)> = (0..a.len()).map(|t| (t, t)).collect();
        let total = path.iter().map(|&(i, j)| cost(i, j)).sum();
        (total, path)
    };
    let mean = total_cost / T::of_usize(path.len());
    Ok(McdResult {
        mcd: mcd_scale::<T>() * mean,
        path,
        total_cost,
    })
}

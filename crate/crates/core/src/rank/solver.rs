//! Primal solver for the squared-hinge relative-attribute ranking problem:
//!
//! ```text
//! min_w  ½‖w‖² + C·[ Σ_ordered max(0, 1 − w·(x_hi − x_lo))² + Σ_similar (w·(x_i − x_j))² ]
//! ```
//!
//! The objective is convex and once differentiable with a piecewise-constant
//! generalized Hessian, so Newton steps (solved by conjugate gradients on
//! Hessian-vector products) with Armijo backtracking converge in a handful of
//! iterations. A plain gradient step is taken whenever the Newton direction
//! fails to produce descent.

use serde::{Deserialize, Serialize};

use super::pairs::PairSet;
use crate::scalar::{dot, norm, Scalar};

/// Hyperparameters of the ranking SVM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankParams<T> {
    #[serde(rename = "C")]
    pub c: T,
    pub tolerance: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for RankParams<T> {
    fn default() -> Self {
        Self {
            c: T::of(0.1),
            tolerance: T::of(1e-6),
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport<T> {
    pub weights: Vec<T>,
    pub objective: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_fallbacks: usize,
}

/// Objective and derivatives over a fixed set of feature rows and pairs.
pub struct PairObjective<'a, T> {
    rows: &'a [Vec<T>],
    pairs: &'a PairSet,
    c: T,
    dim: usize,
}

impl<'a, T: Scalar> PairObjective<'a, T> {
    pub fn new(rows: &'a [Vec<T>], pairs: &'a PairSet, c: T) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        Self { rows, pairs, c, dim }
    }

    fn scores(&self, w: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| dot(r, w)).collect()
    }

    pub fn value(&self, w: &[T]) -> T {
        let s = self.scores(w);
        let half = T::of(0.5);
        let mut loss = T::zero();
        for &(hi, lo) in &self.pairs.ordered {
            let slack = T::one() - (s[hi] - s[lo]);
            if slack > T::zero() {
                loss += slack * slack;
            }
        }
        for &(i, j) in &self.pairs.similar {
            let d = s[i] - s[j];
            loss += d * d;
        }
        half * dot(w, w) + self.c * loss
    }

    /// Gradient, plus the ordered pairs whose hinge is active at `w`.
    fn gradient(&self, w: &[T]) -> (Vec<T>, Vec<bool>) {
        let s = self.scores(w);
        let two_c = (T::one() + T::one()) * self.c;
        // Per-row coefficient so the gradient is Σ_rows coef[r] · x_r.
        let mut coef = vec![T::zero(); self.rows.len()];
        let mut active = vec![false; self.pairs.ordered.len()];
        for (k, &(hi, lo)) in self.pairs.ordered.iter().enumerate() {
            let slack = T::one() - (s[hi] - s[lo]);
            if slack > T::zero() {
                active[k] = true;
                coef[hi] -= two_c * slack;
                coef[lo] += two_c * slack;
            }
        }
        for &(i, j) in &self.pairs.similar {
            let d = two_c * (s[i] - s[j]);
            coef[i] += d;
            coef[j] -= d;
        }
        let mut g = w.to_vec();
        self.accumulate(&coef, &mut g);
        (g, active)
    }

    /// `v + 2C·[Σ_active d(d·v) + Σ_similar s(s·v)]`
    fn hess_vec(&self, v: &[T], active: &[bool]) -> Vec<T> {
        let s = self.scores(v);
        let two_c = (T::one() + T::one()) * self.c;
        let mut coef = vec![T::zero(); self.rows.len()];
        for (&(hi, lo), _) in self.pairs.ordered.iter().zip(active).filter(|(_, &a)| a) {
            let d = two_c * (s[hi] - s[lo]);
            coef[hi] += d;
            coef[lo] -= d;
        }
        for &(i, j) in &self.pairs.similar {
            let d = two_c * (s[i] - s[j]);
            coef[i] += d;
            coef[j] -= d;
        }
        let mut out = v.to_vec();
        self.accumulate(&coef, &mut out);
        out
    }

    fn accumulate(&self, coef: &[T], out: &mut [T]) {
        for (row, &c) in self.rows.iter().zip(coef) {
            if c != T::zero() {
                for (o, &x) in out.iter_mut().zip(row) {
                    *o += c * x;
                }
            }
        }
    }
}

/// Solves `H p = b` for the symmetric positive definite operator `H`.
fn conjugate_gradient<T: Scalar>(
    apply: impl Fn(&[T]) -> Vec<T>,
    b: &[T],
    tol: T,
    max_iter: usize,
) -> Vec<T> {
    let mut x = vec![T::zero(); b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= tol {
            break;
        }
        let hp = apply(&p);
        let php = dot(&p, &hp);
        if !(php > T::zero()) {
            break;
        }
        let alpha = rr / php;
        for ((xi, ri), (&pi, &hpi)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&hp)) {
            *xi += alpha * pi;
            *ri -= alpha * hpi;
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    x
}

fn backtrack<T: Scalar>(
    f: &PairObjective<'_, T>,
    w: &[T],
    fw: T,
    dir: &[T],
    slope: T,
) -> Option<(Vec<T>, T)> {
    let armijo = T::of(1e-4);
    let mut step = T::one();
    for _ in 0..50 {
        let cand: Vec<T> = w.iter().zip(dir).map(|(&a, &d)| a + step * d).collect();
        let fc = f.value(&cand);
        if fc.is_finite() && fc <= fw + armijo * step * slope {
            return Some((cand, fc));
        }
        step = step * T::of(0.5);
    }
    None
}

/// Minimizes the pairwise objective starting from `w = 0`.
pub fn solve<T: Scalar>(
    rows: &[Vec<T>],
    pairs: &PairSet,
    params: &RankParams<T>,
) -> SolverReport<T> {
    let f = PairObjective::new(rows, pairs, params.c);
    let dim = f.dim;
    let mut w = vec![T::zero(); dim];
    let mut fw = f.value(&w);
    let mut iterations = 0;
    let mut fallbacks = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        let (g, active) = f.gradient(&w);
        let gn = norm(&g);
        if !gn.is_finite() {
            break;
        }
        if gn <= params.tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
        let cg_tol = gn * T::of(1e-3).min(gn.sqrt());
        let newton = conjugate_gradient(|v| f.hess_vec(v, &active), &neg_g, cg_tol, 2 * dim + 10);
        let slope = dot(&g, &newton);
        let stepped = if slope < T::zero() {
            backtrack(&f, &w, fw, &newton, slope)
        } else {
            None
        };
        let stepped = stepped.or_else(|| {
            fallbacks += 1;
            backtrack(&f, &w, fw, &neg_g, -(gn * gn))
        });
        match stepped {
            Some((next, fnext)) => {
                w = next;
                fw = fnext;
            }
            // No decrease possible at working precision.
            None => break,
        }
    }

    let (g, _) = f.gradient(&w);
    let grad_norm = norm(&g);
    SolverReport {
        weights: w,
        objective: fw,
        grad_norm,
        iterations,
        converged: converged || grad_norm <= params.tolerance,
        gradient_fallbacks: fallbacks,
    }
}

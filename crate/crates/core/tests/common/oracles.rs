//! Independent reference implementations, written for clarity over speed.

/// Solves `M x = y` for a 3×3 system by Gaussian elimination with partial pivoting.
pub fn solve3(mut m: [[f64; 3]; 3], mut y: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, pivot);
        y.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            y[row] -= f * y[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (y[row] - tail) / m[row][row];
    }
    x
}

/// Coefficients `(a, b, c)` of the parabola through three points.
pub fn parabola_through(points: [(f64, f64); 3]) -> [f64; 3] {
    let m = points.map(|(v, _)| [v * v, v, 1.0]);
    let y = points.map(|(_, t)| t);
    solve3(m, y)
}

/// Levenshtein distance by memoized recursion on suffixes.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut memo = vec![vec![usize::MAX; b.len() + 1]; a.len() + 1];
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut Vec<Vec<usize>>) -> usize {
        if memo[i][j] != usize::MAX {
            return memo[i][j];
        }
        let r = if i == a.len() {
            b.len() - j
        } else if j == b.len() {
            a.len() - i
        } else {
            let sub = go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
            let del = go(a, b, i + 1, j, memo) + 1;
            let ins = go(a, b, i, j + 1, memo) + 1;
            sub.min(del).min(ins)
        };
        memo[i][j] = r;
        r
    }
    go(a, b, 0, 0, &mut memo)
}

fn euclid(a: &[f64], b: &[f64], k0: usize) -> f64 {
    a[k0..].iter().zip(&b[k0..]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Minimum total frame cost over every monotone corner-to-corner path,
/// found by explicit enumeration.
pub fn dtw_brute(a: &[Vec<f64>], b: &[Vec<f64>], k0: usize) -> f64 {
    fn walk(a: &[Vec<f64>], b: &[Vec<f64>], k0: usize, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + euclid(&a[i], &b[j], k0);
        if i == a.len() - 1 && j == b.len() - 1 {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, k0, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, k0, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, k0, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, k0, 0, 0, 0.0, &mut best);
    best
}

/// Per-dimension z-scoring with population std; constant columns keep scale 1.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mut out = rows.to_vec();
    for k in 0..d {
        let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n;
        let sd = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
        for r in &mut out {
            r[k] = (r[k] - mean) / sd;
        }
    }
    out
}

/// The ranking objective evaluated from its definition.
pub fn rank_objective(rows: &[Vec<f64>], ordered: &[(usize, usize)], similar: &[(usize, usize)], c: f64, w: &[f64]) -> f64 {
    let score = |r: &Vec<f64>| r.iter().zip(w).map(|(x, y)| x * y).sum::<f64>();
    let mut loss = 0.0;
    for &(hi, lo) in ordered {
        let m = 1.0 - (score(&rows[hi]) - score(&rows[lo]));
        loss += m.max(0.0).powi(2);
    }
    for &(i, j) in similar {
        loss += (score(&rows[i]) - score(&rows[j])).powi(2);
    }
    0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * loss
}

/// Grid search over a box of half-width `radius`, refined by repeatedly
/// re-gridding around the incumbent. Returns the best value found.
pub fn grid_minimum(dim: usize, radius: f64, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    assert!(dim == 1 || dim == 2);
    let n: usize = if dim == 1 { 20_001 } else { 401 };
    let mut center = vec![0.0; dim];
    let mut half = radius;
    let mut best = (f(&center), center.clone());
    for _ in 0..8 {
        let step = 2.0 * half / (n - 1) as f64;
        let coord = |c: f64, i: usize| c - half + step * i as f64;
        if dim == 1 {
            for i in 0..n {
                let w = [coord(center[0], i)];
                let v = f(&w);
                if v < best.0 {
                    best = (v, w.to_vec());
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let w = [coord(center[0], i), coord(center[1], j)];
                    let v = f(&w);
                    if v < best.0 {
                        best = (v, w.to_vec());
                    }
                }
            }
        }
        center = best.1.clone();
        half = 4.0 * step;
    }
    best
}

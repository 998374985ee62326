//! Weighted least squares via the normal equations and a rank-revealing
//! symmetric eigendecomposition. Full-rank systems are solved exactly (up to
//! rounding); rank-deficient systems return the minimum-norm minimizer.

use crate::{Error, Result};

/// Relative eigenvalue threshold below which a direction is treated as null.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WlsSolution {
    pub coefficients: Vec<f64>,
    /// Numerical rank of the weighted Gram matrix.
    pub rank: usize,
    /// True when the minimizer is not unique and the minimum-norm one was
    /// returned.
    pub rank_deficient: bool,
}

/// Minimizes `sum_j weights[j] * (targets[j] - rows[j] . gamma)^2`.
///
/// Weights must be nonnegative and at least one must be positive; rows with
/// zero weight do not influence the fit.
pub fn wls_solve(rows: &[Vec<f64>], weights: &[f64], targets: &[f64]) -> Result<WlsSolution> {
    if rows.len() != weights.len() || rows.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: weights.len().min(targets.len()),
        });
    }
    let p = match rows.first() {
        Some(r) => r.len(),
        None => return Err(Error::EmptyWindow),
    };
    for row in rows {
        if row.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: row.len() });
        }
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidConfig("weights must be nonnegative".into()));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::EmptyWindow);
    }

    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for ((row, &w), &t) in rows.iter().zip(weights).zip(targets) {
        if w == 0.0 {
            continue;
        }
        accumulate_gram(&mut gram, &mut rhs, row, w, t, p);
    }
    let (solutions, rank, rank_deficient) = solve_gram(&gram, &[rhs], p);
    Ok(WlsSolution {
        coefficients: solutions.into_iter().next().unwrap(),
        rank,
        rank_deficient,
    })
}

/// Adds `w * row row^T` to the Gram matrix and `w * t * row` to the
/// right-hand side. Only the upper triangle of `gram` is maintained;
/// `solve_gram` symmetrizes.
pub(crate) fn accumulate_gram(
    gram: &mut [f64],
    rhs: &mut [f64],
    row: &[f64],
    w: f64,
    t: f64,
    p: usize,
) {
    for i in 0..p {
        let wi = w * row[i];
        rhs[i] += wi * t;
        for j in i..p {
            gram[i * p + j] += wi * row[j];
        }
    }
}

/// Solves `gram x = rhs` for each right-hand side via an eigendecomposition
/// of the (PSD) Gram matrix. Directions with eigenvalue below
/// `RANK_TOL * max eigenvalue` are dropped, which makes the solution the
/// pseudoinverse (minimum-norm) one.
pub(crate) fn solve_gram(
    gram: &[f64],
    rhs_set: &[Vec<f64>],
    p: usize,
) -> (Vec<Vec<f64>>, usize, bool) {
    let mut a = gram.to_vec();
    for i in 0..p {
        for j in 0..i {
            a[i * p + j] = a[j * p + i];
        }
    }
    let (eigenvalues, vectors) = symmetric_eigen(&mut a, p);
    let max_eig = eigenvalues.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = max_eig * RANK_TOL;

    let mut rank = 0usize;
    let mut inv = vec![0.0; p];
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        if lambda.abs() > threshold && lambda != 0.0 {
            inv[k] = 1.0 / lambda;
            rank += 1;
        }
    }

    let mut solutions = Vec::with_capacity(rhs_set.len());
    for rhs in rhs_set {
        debug_assert_eq!(rhs.len(), p);
        // x = V diag(inv) V^T rhs
        let mut proj = vec![0.0; p];
        for k in 0..p {
            if inv[k] == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for i in 0..p {
                dot += vectors[i * p + k] * rhs[i];
            }
            proj[k] = dot * inv[k];
        }
        let mut x = vec![0.0; p];
        for i in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                s += vectors[i * p + k] * proj[k];
            }
            x[i] = s;
        }
        solutions.push(x);
    }
    (solutions, rank, rank < p)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix stored row-major.
/// Returns the eigenvalues and the matrix of eigenvectors (column `k` is the
/// eigenvector of eigenvalue `k`). Destroys `a`.
fn symmetric_eigen(a: &mut [f64], p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    if p == 1 {
        return (vec![a[0]], v);
    }

    let max_sweeps = 50;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off += a[i * p + j] * a[i * p + j];
            }
        }
        let diag: f64 = (0..p).map(|i| a[i * p + i] * a[i * p + i]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[i * p + j];
                if apq == 0.0 {
                    continue;
                }
                let app = a[i * p + i];
                let aqq = a[j * p + j];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..p {
                    let aik = a[i * p + k];
                    let ajk = a[j * p + k];
                    a[i * p + k] = c * aik - s * ajk;
                    a[j * p + k] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    a[k * p + i] = c * aki - s * akj;
                    a[k * p + j] = s * aki + c * akj;
                }
                for k in 0..p {
                    let vki = v[k * p + i];
                    let vkj = v[k * p + j];
                    v[k * p + i] = c * vki - s * vkj;
                    v[k * p + j] = s * vki + c * vkj;
                }
            }
        }
    }
    let eigenvalues = (0..p).map(|i| a[i * p + i]).collect();
    (eigenvalues, v)
}

//! The polynomial basis indexed by multi-indices of bounded total order.

use crate::{Error, Result};

/// A multi-index `(i_1, ..., i_m)` of nonnegative integers, addressing the
/// monomial `u_1^{i_1} ... u_m^{i_m}` of a multivariate polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        assert!(!entries.is_empty(), "multi-index must have at least one entry");
        Self { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Total order `i_1 + ... + i_m`.
    pub fn order(&self) -> usize {
        self.entries.iter().sum()
    }

    /// Number of coordinates `m`.
    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|&i| i == 0)
    }
}

/// Number of multi-indices of dimension `m` and total order at most `d`,
/// i.e. `binomial(m + d, d)`.
pub fn basis_size(dimension: usize, degree: usize) -> usize {
    // binomial(m + d, d) computed incrementally to stay exact
    let mut b = 1usize;
    for i in 1..=degree {
        b = b * (dimension + i) / i;
    }
    b
}

/// All multi-indices of dimension `m` with total order at most `d`, in graded
/// lexicographic order. The all-zeros index is first; coefficient extraction
/// in the smoother relies on that position.
pub fn multi_index_set(dimension: usize, degree: usize) -> Vec<MultiIndex> {
    assert!(dimension >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(basis_size(dimension, degree));
    for order in 0..=degree {
        push_compositions(dimension, order, &mut Vec::new(), &mut out);
    }
    out
}

fn push_compositions(
    dims_left: usize,
    total: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if dims_left == 1 {
        prefix.push(total);
        out.push(MultiIndex::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        push_compositions(dims_left - 1, total - first, prefix, out);
        prefix.pop();
    }
}

/// The scaled monomial `psi_i(u) = prod_k u_k^{i_k} / i_k!`.
pub fn psi(index: &MultiIndex, u: &[f64]) -> Result<f64> {
    if u.len() != index.dimension() {
        return Err(Error::DimensionMismatch {
            expected: index.dimension(),
            got: u.len(),
        });
    }
    let mut value = 1.0;
    for (&i, &uk) in index.entries().iter().zip(u) {
        value *= uk.powi(i as i32) / factorial(i);
    }
    Ok(value)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Evaluates the whole basis of `indices` at `u`, writing into `out`.
/// Used in the smoother's inner loop to avoid reallocation.
pub(crate) fn eval_basis(indices: &[MultiIndex], u: &[f64], out: &mut [f64]) {
    debug_assert_eq!(indices.len(), out.len());
    for (slot, index) in out.iter_mut().zip(indices) {
        let mut value = 1.0;
        for (&i, &uk) in index.entries().iter().zip(u) {
            value *= uk.powi(i as i32) / factorial(i);
        }
        *slot = value;
    }
}

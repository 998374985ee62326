//! Product kernels on `[-1, 1]^m` and the bandwidth rule.

use crate::{Error, Result};

/// A one-dimensional kernel density supported on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel1d {
    /// `w(u) = (70/81) (1 - |u|^3)^3` on `[-1, 1]`, zero outside.
    Tricube,
}

impl Kernel1d {
    pub fn density(self, u: f64) -> f64 {
        match self {
            Kernel1d::Tricube => {
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let c = 1.0 - u.abs().powi(3);
                    70.0 / 81.0 * c * c * c
                }
            }
        }
    }
}

/// A product kernel `w(u) = w_1(u_1) ... w_m(u_m)`, one density per
/// covariate coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    coords: Vec<Kernel1d>,
}

impl KernelSpec {
    pub fn new(coords: Vec<Kernel1d>) -> Self {
        assert!(!coords.is_empty(), "kernel must cover at least one coordinate");
        Self { coords }
    }

    /// The product of tricube densities in every coordinate.
    pub fn tricube(dimension: usize) -> Self {
        Self::new(vec![Kernel1d::Tricube; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Kernel1d] {
        &self.coords
    }
}

/// `prod_k w_k(u_k / bandwidth)`. Zero whenever any `|u_k| > bandwidth`.
pub fn kernel_weight(kernel: &KernelSpec, u: &[f64], bandwidth: f64) -> f64 {
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    assert_eq!(u.len(), kernel.dimension(), "kernel/point dimension mismatch");
    let mut w = 1.0;
    for (&k, &uk) in kernel.coords.iter().zip(u) {
        w *= k.density(uk / bandwidth);
        if w == 0.0 {
            return 0.0;
        }
    }
    w
}

/// The bandwidth `3 (n log n)^{-1/7}` used throughout the numerical study.
pub fn bandwidth_rule(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "bandwidth rule needs a sample size of at least 2, got {n}"
        )));
    }
    let n = n as f64;
    Ok(3.0 * (n * n.ln()).powf(-1.0 / 7.0))
}

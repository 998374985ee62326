//! Multivariate local polynomial smoothing on complete cases.
//!
//! Estimates the conditional moments `r(x) = E(Y|X=x)` and
//! `r2(x) = E(Y^2|X=x)` by weighted least squares over a kernel window, using
//! only rows whose response was observed, and derives the scale estimate
//! `sigma_hat = sqrt(r2_hat - r_hat^2)`.
//!
//! All operations are pure functions of their inputs; datasets and configs
//! are immutable after construction, so evaluations at distinct points can
//! run in parallel without coordination.

mod basis;
mod dataset;
mod fit;
mod kernel;
mod wls;

pub use basis::{basis_size, multi_index_set, psi, MultiIndex};
pub use dataset::{DataRow, Dataset};
pub use fit::{
    estimate_sigma, fit_conditional_moment, FitDiagnostics, MomentPower, SmootherConfig,
};
pub use kernel::{bandwidth_rule, kernel_weight, Kernel1d, KernelSpec};
pub use wls::{wls_solve, WlsSolution};

pub(crate) use fit::fit_moments_stabilized;

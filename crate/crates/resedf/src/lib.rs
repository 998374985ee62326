//! Estimation of the error distribution in heteroskedastic nonparametric
//! regression when responses are missing at random.
//!
//! The model is `Y = r(X) + sigma(X) e` with covariates `X` in R^m, a smooth
//! regression function `r`, a smooth positive scale function `sigma`, and an
//! error `e` independent of `X` with mean zero and unit variance. Responses
//! may be missing: each observation is a triple `(X, delta * Y, delta)` where
//! the indicator `delta` is 1 exactly when `Y` was observed, and the
//! missingness probability depends on the covariates only.
//!
//! Everything is estimated from the complete cases (rows with `delta = 1`):
//!
//! * [`localpoly`] — multivariate local polynomial smoothers for the
//!   conditional moments `E(Y|X=x)` and `E(Y^2|X=x)`, and the derived scale
//!   estimate.
//! * [`edf`] — standardized residuals and the residual-based empirical
//!   distribution function `F_hat(t)`, together with the asymptotic
//!   linearization used to test it.
//! * [`efficiency`] — the semiparametric efficiency calculus: score
//!   functions, projections, efficient influence functions, and
//!   quadrature-based asymptotic variance / AMISE.
//! * [`simulation`] — a reproducible Monte Carlo harness producing scaled
//!   bias/variance/MSE/MISE summary tables.
//! * [`cli`] — the `resedf` command line: `estimate`, `simulate`,
//!   `efficiency`.
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `cargo run --release --example residual_edf`.

pub mod cli;
pub mod edf;
pub mod efficiency;
mod error;
pub mod localpoly;
pub mod simulation;

pub use error::{Error, Result};

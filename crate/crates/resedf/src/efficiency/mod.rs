//! The semiparametric efficiency calculus for functionals of the error law.
//!
//! Under missingness at random the efficient influence function for
//! estimating `E[h(e)]` from observations `(X, delta Y, delta)` is carried by
//! the complete cases alone. This module computes its ingredients — scores,
//! moment matrices, projections — and the asymptotic variance and AMISE of
//! the residual-based EDF, which form the infinite-sample reference row of
//! the simulation tables.

mod influence;
mod law;
mod quadrature;

pub use influence::{
    edf_amise, edf_asymptotic_variance, edf_influence, jd_inverse, score_location, score_scale,
    EfficientInfluence, GradientComponents, Matrix2, MissingnessSummary, Projection,
};
pub use law::{validate_law, CustomLaw, ErrorLaw, StandardNormal};
pub use quadrature::{quadrature, quadrature_2d, quadrature_split, DEFAULT_DOMAIN, DEFAULT_TOL};

pub(crate) use influence::trapezoid;

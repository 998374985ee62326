//! Error distributions: density, CDF, score ingredients, and moments.

use super::quadrature::{quadrature, DEFAULT_DOMAIN};
use crate::{Error, Result};
use std::f64::consts::{PI, SQRT_2};

/// An error distribution with mean zero and unit variance, exposing the
/// pieces the efficiency calculus needs: the density `f`, its derivative,
/// the CDF `F`, and the third and fourth moments.
pub trait ErrorLaw {
    fn density(&self, z: f64) -> f64;
    fn cdf(&self, z: f64) -> f64;
    fn density_derivative(&self, z: f64) -> f64;
    /// `E[e^3]`
    fn third_moment(&self) -> f64;
    /// `E[e^4]`
    fn fourth_moment(&self) -> f64;
}

/// The standard normal law, with analytic density, CDF, and moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StandardNormal;

impl ErrorLaw for StandardNormal {
    fn density(&self, z: f64) -> f64 {
        (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
    }

    fn cdf(&self, z: f64) -> f64 {
        0.5 * erfc(-z / SQRT_2)
    }

    fn density_derivative(&self, z: f64) -> f64 {
        -z * self.density(z)
    }

    fn third_moment(&self) -> f64 {
        0.0
    }

    fn fourth_moment(&self) -> f64 {
        3.0
    }
}

/// A user-supplied error law. Construction validates, by quadrature over
/// [-10, 10], that the density integrates to one with mean zero and unit
/// variance, that the moment denominator `E[e^4] - E^2[e^3] - 1` is positive,
/// and that the Fisher information for location and scale is finite.
pub struct CustomLaw {
    density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    cdf: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    density_derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    third: f64,
    fourth: f64,
}

impl CustomLaw {
    pub fn new(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        density_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let tol = 1e-9;
        let third = quadrature(|z| z.powi(3) * density(z), DEFAULT_DOMAIN, tol)?;
        let fourth = quadrature(|z| z.powi(4) * density(z), DEFAULT_DOMAIN, tol)?;
        let law = Self {
            density: Box::new(density),
            cdf: Box::new(cdf),
            density_derivative: Box::new(density_derivative),
            third,
            fourth,
        };
        validate_law(&law, 1e-6)?;
        Ok(law)
    }
}

impl ErrorLaw for CustomLaw {
    fn density(&self, z: f64) -> f64 {
        (self.density)(z)
    }

    fn cdf(&self, z: f64) -> f64 {
        (self.cdf)(z)
    }

    fn density_derivative(&self, z: f64) -> f64 {
        (self.density_derivative)(z)
    }

    fn third_moment(&self) -> f64 {
        self.third
    }

    fn fourth_moment(&self) -> f64 {
        self.fourth
    }
}

/// Checks the standing assumptions on an error law by quadrature:
/// normalization, mean zero, unit variance, consistency of the stored third
/// and fourth moments, positivity of `E[e^4] - E^2[e^3] - 1`, and finite
/// Fisher information for location and scale.
pub fn validate_law<L: ErrorLaw>(law: &L, tol: f64) -> Result<()> {
    let qtol = (tol / 10.0).min(1e-8);
    let mass = quadrature(|z| law.density(z), DEFAULT_DOMAIN, qtol)?;
    if (mass - 1.0).abs() > tol {
        return Err(Error::InvalidLaw(format!(
            "density integrates to {mass}, not 1"
        )));
    }
    let mean = quadrature(|z| z * law.density(z), DEFAULT_DOMAIN, qtol)?;
    if mean.abs() > tol {
        return Err(Error::InvalidLaw(format!("mean is {mean}, not 0")));
    }
    let var = quadrature(|z| z * z * law.density(z), DEFAULT_DOMAIN, qtol)?;
    if (var - 1.0).abs() > tol {
        return Err(Error::InvalidLaw(format!("variance is {var}, not 1")));
    }
    let third = quadrature(|z| z.powi(3) * law.density(z), DEFAULT_DOMAIN, qtol)?;
    if (third - law.third_moment()).abs() > tol.max(1e-6) {
        return Err(Error::InvalidLaw(format!(
            "stored third moment {} disagrees with quadrature {third}",
            law.third_moment()
        )));
    }
    let fourth = quadrature(|z| z.powi(4) * law.density(z), DEFAULT_DOMAIN, qtol)?;
    if (fourth - law.fourth_moment()).abs() > tol.max(1e-6) {
        return Err(Error::InvalidLaw(format!(
            "stored fourth moment {} disagrees with quadrature {fourth}",
            law.fourth_moment()
        )));
    }
    let denom = law.fourth_moment() - law.third_moment().powi(2) - 1.0;
    if denom <= 0.0 {
        return Err(Error::DegenerateMoments(denom));
    }
    // the scores divide by f, so it must stay positive across the domain
    let (lo, hi) = DEFAULT_DOMAIN;
    for i in 0..=400 {
        let z = lo + (hi - lo) * i as f64 / 400.0;
        if !(law.density(z) > 0.0) {
            return Err(Error::InvalidLaw(format!("density is not positive at z = {z}")));
        }
    }
    // Fisher information for location and scale:
    // int (1 + z^2) (f'(z)/f(z))^2 f(z) dz
    let info = quadrature(
        |z| {
            let f = law.density(z);
            if f > 0.0 {
                let fp = law.density_derivative(z);
                (1.0 + z * z) * fp * fp / f
            } else {
                0.0
            }
        },
        DEFAULT_DOMAIN,
        1e-6,
    )?;
    if !info.is_finite() {
        return Err(Error::InvalidLaw(
            "Fisher information for location and scale is not finite".into(),
        ));
    }
    Ok(())
}

/// Complementary error function, accurate to close to machine precision.
///
/// Small arguments use the non-alternating confluent series
/// `erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_n (2x^2)^n / (2n+1)!!`; large
/// arguments use the Legendre continued fraction for `erfc`, evaluated by the
/// modified Lentz recurrence.
pub(crate) fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let xx = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * xx / (2 * n + 1) as f64;
        sum += term;
        if term < sum * 1e-17 || n > 200 {
            break;
        }
    }
    2.0 * x / PI.sqrt() * (-xx).exp() * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..300 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

//! Adaptive composite quadrature.
//!
//! Simpson's rule over an initial uniform mesh with successive interval
//! refinement. An interval is accepted when the two-panel refinement moves
//! its estimate by less than its share of the tolerance; otherwise it is
//! bisected. Intervals narrower than a width floor are accepted with their
//! discrepancy charged to a slop budget, so integrands with jump
//! discontinuities terminate; if the budget exceeds the tolerance the
//! integral is reported as non-convergent.
//!
//! Features narrower than the initial mesh (about 0.3 covariate units on the
//! default domain) can in principle fall between the initial nodes; callers
//! integrating something with a known kink or jump should pass its location
//! to [`quadrature_split`], which cuts the domain there and integrates the
//! smooth pieces.

use crate::{Error, Result};

/// Default domain for moments of an error law; the laws used here have
/// negligible mass outside.
pub const DEFAULT_DOMAIN: (f64, f64) = (-10.0, 10.0);

/// Default tolerance for law moments.
pub const DEFAULT_TOL: f64 = 1e-8;

const INITIAL_PANELS: usize = 64;
const MAX_DEPTH: u32 = 48;

/// Integrates `integrand` over `domain` to absolute tolerance `tol`.
pub fn quadrature<F: Fn(f64) -> f64>(integrand: F, domain: (f64, f64), tol: f64) -> Result<f64> {
    quadrature_split(integrand, domain, tol, &[])
}

/// As [`quadrature`], additionally cutting the domain at `breaks` so the
/// integrand only needs to be smooth between consecutive cuts.
pub fn quadrature_split<F: Fn(f64) -> f64>(
    integrand: F,
    domain: (f64, f64),
    tol: f64,
    breaks: &[f64],
) -> Result<f64> {
    let (a, b) = domain;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(
            "quadrature tolerance must be positive".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::InvalidConfig(
            "quadrature domain must be ordered".into(),
        ));
    }

    let mut cuts: Vec<f64> = (0..=INITIAL_PANELS)
        .map(|i| a + (b - a) * i as f64 / INITIAL_PANELS as f64)
        .collect();
    cuts.extend(breaks.iter().copied().filter(|t| *t > a && *t < b));
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("cuts must not be NaN"));
    cuts.dedup();

    let width_floor = (b - a) * 2.0f64.powi(-(MAX_DEPTH as i32));
    let mut slop = 0.0;
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let budget = tol * (hi - lo) / (b - a);
        let flo = integrand(lo);
        let fhi = integrand(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = integrand(mid);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total += refine(
            &integrand,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            budget,
            width_floor,
            &mut slop,
        );
    }
    if slop > tol || !total.is_finite() {
        return Err(Error::QuadratureDivergence { tol });
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    width_floor: f64,
    slop: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) <= width_floor {
        if delta.abs() > 15.0 * tol {
            *slop += delta.abs();
        }
        // Richardson extrapolation of the two estimates
        return left + right + delta / 15.0;
    }
    let half_tol = tol / 2.0;
    refine(f, a, m, fa, flm, fm, left, half_tol, width_floor, slop)
        + refine(f, m, b, fm, frm, fb, right, half_tol, width_floor, slop)
}

/// Iterated 1-D quadrature over a rectangle.
pub fn quadrature_2d<F: Fn(f64, f64) -> f64>(
    integrand: F,
    domain_x: (f64, f64),
    domain_y: (f64, f64),
    tol: f64,
) -> Result<f64> {
    // inner integrals get a tighter tolerance so their error does not
    // pollute the outer refinement decisions
    let inner_tol = tol / 100.0;
    quadrature(
        |x| quadrature(|y| integrand(x, y), domain_y, inner_tol).unwrap_or(f64::NAN),
        domain_x,
        tol,
    )
}

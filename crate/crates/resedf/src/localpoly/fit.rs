//! Local polynomial estimation of conditional moments on complete cases.
//!
//! At a target point `x0` the degree-`d` estimator minimizes
//! `sum_j delta_j (Y_j^a - sum_i gamma_i psi_i((X_j - x0)/lambda))^2
//!  * w((X_j - x0)/lambda)` over the coefficient vector `gamma`, and reports
//! the constant term. `a = 1` estimates `r(x0) = E(Y|X=x0)`, `a = 2`
//! estimates `r2(x0) = E(Y^2|X=x0)`, and the scale estimate is
//! `sigma_hat(x0) = sqrt(r2_hat - r_hat^2)` floored away from zero.

use super::basis::{self, MultiIndex};
use super::dataset::Dataset;
use super::kernel::{kernel_weight, KernelSpec};
use super::wls;
use crate::{Error, Result};

/// Everything defining a local polynomial fit.
#[derive(Debug, Clone)]
pub struct SmootherConfig {
    /// Covariate dimension `m`.
    pub dimension: usize,
    /// Polynomial degree `d`.
    pub degree: usize,
    /// Bandwidth `lambda`, in covariate units.
    pub bandwidth: f64,
    pub kernel: KernelSpec,
    /// Floor for the variance estimate `r2_hat - r_hat^2` (a variance, not a
    /// standard deviation).
    pub variance_floor: f64,
    /// Degenerate windows escalate the bandwidth by factors of 1.5 up to
    /// `escalation_cap * bandwidth` before falling back to a minimum-norm fit.
    pub escalation_cap: f64,
}

impl SmootherConfig {
    /// Tricube kernel, variance floor `1e-6`, escalation cap `4 * bandwidth`.
    pub fn new(dimension: usize, degree: usize, bandwidth: f64) -> Result<Self> {
        let cfg = Self {
            dimension,
            degree,
            bandwidth,
            kernel: KernelSpec::tricube(dimension),
            variance_floor: 1e-6,
            escalation_cap: 4.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        if !(self.variance_floor > 0.0) {
            return Err(Error::InvalidConfig("variance floor must be positive".into()));
        }
        if !(self.escalation_cap >= 1.0) {
            return Err(Error::InvalidConfig(
                "escalation cap must be at least 1".into(),
            ));
        }
        if self.kernel.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: self.kernel.dimension(),
            });
        }
        Ok(())
    }

    /// Size of the polynomial basis, `binomial(m + d, d)`.
    pub fn basis_size(&self) -> usize {
        basis::basis_size(self.dimension, self.degree)
    }
}

/// Which conditional moment to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentPower {
    /// `E(Y | X = x)`
    First,
    /// `E(Y^2 | X = x)`
    Second,
}

/// What actually happened during a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    /// Complete cases with positive kernel weight in the final window.
    pub effective_count: usize,
    /// The window stayed rank-deficient at the bandwidth cap and the
    /// minimum-norm coefficient was used.
    pub rank_fallback: bool,
    /// Bandwidth of the final window; at least the configured one.
    pub bandwidth_used: f64,
    /// Set by [`estimate_sigma`] when the variance estimate hit its floor.
    pub variance_clamped: bool,
}

/// Local polynomial estimate of `E(Y^a | X = x0)` over complete cases.
pub fn fit_conditional_moment(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
    power: MomentPower,
) -> Result<(f64, FitDiagnostics)> {
    let (first, second, diagnostics) = fit_both_moments(data, x0, cfg)?;
    let estimate = match power {
        MomentPower::First => first,
        MomentPower::Second => second,
    };
    Ok((estimate, diagnostics))
}

/// `sigma_hat(x0) = sqrt(max(r2_hat - r_hat^2, variance_floor))`.
///
/// A window whose implied variance falls to (or below) the floor is treated
/// like any other degenerate window: the bandwidth escalates and both moments
/// are refit, so the scale stays meaningful wherever the data allow. Only a
/// window that is still degenerate at the bandwidth cap is clamped to the
/// floor, with the clamp flagged.
pub fn estimate_sigma(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
) -> Result<(f64, FitDiagnostics)> {
    let (first, second, mut diagnostics) = fit_moments_stabilized(data, x0, cfg)?;
    let mut variance = second - first * first;
    if variance < cfg.variance_floor {
        variance = cfg.variance_floor;
        diagnostics.variance_clamped = true;
    }
    Ok((variance.sqrt(), diagnostics))
}

/// Both moment fits, escalating only on empty or rank-deficient windows.
pub(crate) fn fit_both_moments(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
) -> Result<(f64, f64, FitDiagnostics)> {
    fit_moments_engine(data, x0, cfg, false)
}

/// Both moment fits, additionally escalating while the implied variance
/// `r2_hat - r_hat^2` is at or below the floor. Used wherever a scale
/// estimate is about to be formed.
pub(crate) fn fit_moments_stabilized(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
) -> Result<(f64, f64, FitDiagnostics)> {
    fit_moments_engine(data, x0, cfg, true)
}

/// The shared fitting loop. The window, weights, and Gram matrix depend only
/// on the covariates, so the two moment fits share them; only the right-hand
/// sides differ.
fn fit_moments_engine(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
    stabilize_variance: bool,
) -> Result<(f64, f64, FitDiagnostics)> {
    cfg.validate()?;
    if x0.len() != data.dimension() || x0.len() != cfg.dimension {
        return Err(Error::DimensionMismatch {
            expected: cfg.dimension,
            got: x0.len().min(data.dimension()),
        });
    }
    if data.complete_case_count() == 0 {
        return Err(Error::NoCompleteCases);
    }

    let indices: Vec<MultiIndex> = basis::multi_index_set(cfg.dimension, cfg.degree);
    // coefficient extraction below reads position 0 as the constant term
    debug_assert!(indices[0].is_constant());
    let p = indices.len();
    let cap = cfg.bandwidth * cfg.escalation_cap;
    let mut bandwidth = cfg.bandwidth;

    loop {
        let at_cap = bandwidth >= cap;
        match try_window(data, x0, cfg, &indices, p, bandwidth)? {
            Some((first, second, effective, deficient)) => {
                let variance_ok =
                    !stabilize_variance || second - first * first > cfg.variance_floor;
                if (!deficient && variance_ok) || at_cap {
                    return Ok((
                        first,
                        second,
                        FitDiagnostics {
                            effective_count: effective,
                            rank_fallback: deficient,
                            bandwidth_used: bandwidth,
                            variance_clamped: false,
                        },
                    ));
                }
            }
            None => {
                if at_cap {
                    return Err(Error::InsufficientData { max_bandwidth: cap });
                }
            }
        }
        bandwidth = (bandwidth * 1.5).min(cap);
    }
}

/// One weighted fit at a fixed bandwidth; `None` when the window is empty.
fn try_window(
    data: &Dataset,
    x0: &[f64],
    cfg: &SmootherConfig,
    indices: &[MultiIndex],
    p: usize,
    bandwidth: f64,
) -> Result<Option<(f64, f64, usize, bool)>> {
    let mut gram = vec![0.0; p * p];
    let mut rhs1 = vec![0.0; p];
    let mut rhs2 = vec![0.0; p];
    let mut row = vec![0.0; p];
    let mut u = vec![0.0; cfg.dimension];
    let mut effective = 0usize;

    for case in data.complete_cases() {
        for (slot, (&xj, &x0j)) in u.iter_mut().zip(case.x.iter().zip(x0)) {
            *slot = xj - x0j;
        }
        let w = kernel_weight(&cfg.kernel, &u, bandwidth);
        if w == 0.0 {
            continue;
        }
        for slot in u.iter_mut() {
            *slot /= bandwidth;
        }
        basis::eval_basis(indices, &u, &mut row);
        effective += 1;
        wls::accumulate_gram(&mut gram, &mut rhs1, &row, w, case.y, p);
        // second-moment right-hand side reuses the same weighted row
        for i in 0..p {
            rhs2[i] += w * row[i] * case.y * case.y;
        }
    }

    if effective == 0 {
        return Ok(None);
    }
    let (solutions, _rank, deficient) = wls::solve_gram(&gram, &[rhs1, rhs2], p);
    Ok(Some((solutions[0][0], solutions[1][0], effective, deficient)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localpoly::dataset::DataRow;

    fn config(dimension: usize, degree: usize, bandwidth: f64) -> SmootherConfig {
        SmootherConfig::new(dimension, degree, bandwidth).unwrap()
    }

    #[test]
    fn degree_zero_is_the_weighted_mean() {
        // equally weighted: all points at x0 so every kernel weight is w(0)^m
        let rows = vec![
            DataRow::observed(vec![0.0], 1.0),
            DataRow::observed(vec![0.0], 2.0),
            DataRow::observed(vec![0.0], 6.0),
        ];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 1.0);
        let (r, diag) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
        let (r2, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::Second).unwrap();
        assert!((r2 - (1.0 + 4.0 + 36.0) / 3.0).abs() < 1e-12);
        assert_eq!(diag.effective_count, 3);
        assert!(!diag.rank_fallback);
    }

    fn cubic(x: &[f64]) -> f64 {
        1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] - 0.3 * x[0] * x[0] * x[1]
            + 0.1 * x[1] * x[1] * x[1]
    }

    #[test]
    fn reproduces_cubics_exactly() {
        let mut rows = Vec::new();
        let grid = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9];
        for &a in &grid {
            for &b in &grid {
                rows.push(DataRow::observed(vec![a, b], cubic(&[a, b])));
            }
        }
        let data = Dataset::new(rows).unwrap();
        let cfg = config(2, 3, 1.0);
        for x0 in [[0.0, 0.0], [0.2, -0.4], [-0.5, 0.5]] {
            let (r, diag) =
                fit_conditional_moment(&data, &x0, &cfg, MomentPower::First).unwrap();
            let truth = cubic(&x0);
            assert!(
                (r - truth).abs() <= 1e-8 * truth.abs().max(1.0),
                "at {x0:?}: {r} vs {truth}"
            );
            assert!(!diag.rank_fallback);
        }
    }

    #[test]
    fn complete_case_invariance() {
        let mut rows = vec![
            DataRow::observed(vec![0.1], 1.0),
            DataRow::observed(vec![-0.2], 2.0),
            DataRow::observed(vec![0.4], 0.5),
            DataRow::missing(vec![0.0]),
        ];
        let data = Dataset::new(rows.clone()).unwrap();
        let cfg = config(1, 1, 1.0);
        let (base, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();

        rows[3].y = 1e9;
        let corrupted = Dataset::new(rows).unwrap();
        let (same, _) =
            fit_conditional_moment(&corrupted, &[0.0], &cfg, MomentPower::First).unwrap();
        assert_eq!(base, same);
    }

    #[test]
    fn zero_weight_rows_never_matter() {
        let rows = vec![
            DataRow::observed(vec![0.0], 1.0),
            DataRow::observed(vec![0.1], 1.5),
            DataRow::observed(vec![5.0], -3.0), // outside every window below
        ];
        let data = Dataset::new(rows.clone()).unwrap();
        let cfg = config(1, 1, 0.5);
        let (base, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();

        let mut moved = rows;
        moved[2].y = 1e6;
        let data2 = Dataset::new(moved).unwrap();
        let (same, _) = fit_conditional_moment(&data2, &[0.0], &cfg, MomentPower::First).unwrap();
        assert_eq!(base, same);
    }

    #[test]
    fn shuffling_rows_changes_nothing() {
        let rows = vec![
            DataRow::observed(vec![0.1], 1.0),
            DataRow::observed(vec![-0.3], 2.0),
            DataRow::observed(vec![0.2], -0.5),
            DataRow::observed(vec![0.35], 0.7),
        ];
        let data = Dataset::new(rows.clone()).unwrap();
        let cfg = config(1, 1, 1.0);
        let (base, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();

        let mut shuffled = rows;
        shuffled.reverse();
        shuffled.swap(0, 2);
        let data2 = Dataset::new(shuffled).unwrap();
        let (same, _) = fit_conditional_moment(&data2, &[0.0], &cfg, MomentPower::First).unwrap();
        assert!((base - same).abs() < 1e-13);
    }

    #[test]
    fn bandwidth_escalates_until_the_window_fills() {
        // nearest complete case sits at distance 0.3; initial bandwidth 0.1
        let rows = vec![
            DataRow::observed(vec![0.3], 2.0),
            DataRow::observed(vec![0.4], 2.0),
        ];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 0.1);
        let (r, diag) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(diag.bandwidth_used > cfg.bandwidth);
        assert!(diag.bandwidth_used <= cfg.bandwidth * cfg.escalation_cap);
    }

    #[test]
    fn insufficient_data_beyond_the_cap() {
        let rows = vec![DataRow::observed(vec![10.0], 1.0)];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 0.5);
        let err = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First);
        assert!(matches!(err, Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn all_missing_is_an_error() {
        let rows = vec![DataRow::missing(vec![0.0])];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 1.0);
        assert!(matches!(
            fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First),
            Err(Error::NoCompleteCases)
        ));
    }

    #[test]
    fn rank_fallback_at_cap_is_flagged() {
        // two coincident complete cases cannot identify a line
        let rows = vec![
            DataRow::observed(vec![0.0], 1.0),
            DataRow::observed(vec![0.0], 3.0),
        ];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 1, 1.0);
        let (r, diag) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();
        assert!(diag.rank_fallback);
        assert!((r - 2.0).abs() < 1e-12); // constant direction is identified
        assert!((diag.bandwidth_used - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_floor_on_degenerate_window() {
        let rows = vec![DataRow::observed(vec![0.0], 5.0)];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 1.0);
        let (sigma, diag) = estimate_sigma(&data, &[0.0], &cfg).unwrap();
        // single point: r2 = 25, r = 5, difference 0 -> floored
        assert!((sigma - cfg.variance_floor.sqrt()).abs() < 1e-15);
        assert!(diag.variance_clamped);
    }

    #[test]
    fn sigma_recovers_constant_scale() {
        // y = 2 + noise-free alternating +-sigma pattern has exact moments
        // under a degree-0 fit with symmetric points
        let rows = vec![
            DataRow::observed(vec![0.0], 2.0 + 0.5),
            DataRow::observed(vec![0.0], 2.0 - 0.5),
        ];
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 0, 1.0);
        let (sigma, diag) = estimate_sigma(&data, &[0.0], &cfg).unwrap();
        assert!((sigma - 0.5).abs() < 1e-12);
        assert!(!diag.variance_clamped);
    }

    #[test]
    fn sigma_is_consistent_for_a_constant_scale() {
        // statistical check: y = 1 + x + 0.8 e at n = 2000 recovers
        // sigma_0 = 0.8 at the center to Monte Carlo accuracy
        let mut stream = crate::simulation::derive_stream(5, 2000, 0, 0);
        let rows: Vec<DataRow> = (0..2000)
            .map(|_| {
                let x = stream.uniform_in(-1.0, 1.0);
                let e = stream.standard_normal();
                DataRow::observed(vec![x], 1.0 + x + 0.8 * e)
            })
            .collect();
        let data = Dataset::new(rows).unwrap();
        let cfg = config(1, 1, 0.4);
        let (sigma, diag) = estimate_sigma(&data, &[0.0], &cfg).unwrap();
        assert!(!diag.variance_clamped);
        assert!((sigma - 0.8).abs() < 0.08, "sigma_hat = {sigma}");
    }
}

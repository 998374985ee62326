//! Complete-case residuals and the residual-based empirical distribution
//! function
//! `F_hat(t) = (1/N) sum_j delta_j 1[(Y_j - r_hat(X_j)) / sigma_hat(X_j) <= t]`,
//! together with the asymptotic linearization it is tested against.

use crate::efficiency::ErrorLaw;
use crate::localpoly::{fit_moments_stabilized, Dataset, SmootherConfig};
use crate::{Error, Result};

/// Standardized residuals, one per complete case, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl ResidualSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoCompleteCases);
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("residuals must not be NaN"));
        Ok(Self { values, sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `N`, the number of complete cases.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one residual
    }
}

/// Counters aggregated over the per-point smoother fits behind a residual
/// set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResidualDiagnostics {
    /// Fits whose variance estimate hit the configured floor.
    pub clamp_count: usize,
    /// Fits that fell back to a minimum-norm solution at the bandwidth cap.
    pub rank_fallback_count: usize,
    /// Fits that needed a bandwidth above the configured one.
    pub escalation_count: usize,
}

/// Builds the residual `(y - r_hat(x)) / sigma_hat(x)` for every complete
/// case, fitting both conditional moments on the same dataset. Rows with a
/// missing response contribute nothing — not to the fits, not to the
/// residuals. Each point's numerator and scale come from the same final
/// window, bandwidth-escalated if the window was degenerate there.
pub fn complete_case_residuals(
    data: &Dataset,
    cfg: &SmootherConfig,
) -> Result<(ResidualSet, ResidualDiagnostics)> {
    let mut values = Vec::with_capacity(data.complete_case_count());
    let mut diagnostics = ResidualDiagnostics::default();
    for case in data.complete_cases() {
        let (first, second, fit) = fit_moments_stabilized(data, &case.x, cfg)?;
        let mut variance = second - first * first;
        if variance < cfg.variance_floor {
            variance = cfg.variance_floor;
            diagnostics.clamp_count += 1;
        }
        if fit.rank_fallback {
            diagnostics.rank_fallback_count += 1;
        }
        if fit.bandwidth_used > cfg.bandwidth {
            diagnostics.escalation_count += 1;
        }
        values.push((case.y - first) / variance.sqrt());
    }
    Ok((ResidualSet::new(values)?, diagnostics))
}

/// `(1/N) #{residuals <= t}`; right-continuous by the `<=` convention.
pub fn edf_evaluate(residuals: &ResidualSet, t: f64) -> f64 {
    let count = residuals.sorted.partition_point(|&v| v <= t);
    count as f64 / residuals.len() as f64
}

/// An EDF sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EdfCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl EdfCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

/// Evaluates the EDF pointwise on the grid. Monotone and `[0, 1]`-valued by
/// construction.
pub fn edf_curve(residuals: &ResidualSet, grid: &[f64]) -> Result<EdfCurve> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedGrid);
    }
    let values = grid.iter().map(|&t| edf_evaluate(residuals, t)).collect();
    Ok(EdfCurve { grid: grid.to_vec(), values })
}

/// The linearization the residual EDF converges to: for the latent errors
/// and observation indicators,
/// `(1/N) sum_j delta_j [1[e_j <= t] + f(t) {e_j + (t/2)(e_j^2 - 1)}]`.
///
/// Comparing `F_hat` against this quantity isolates the error the smoothers
/// contribute; the gap shrinks faster than `n^{-1/2}`.
pub fn expansion_oracle<L: ErrorLaw>(
    errors: &[f64],
    observed: &[bool],
    law: &L,
    t: f64,
) -> Result<f64> {
    if errors.len() != observed.len() {
        return Err(Error::DimensionMismatch {
            expected: errors.len(),
            got: observed.len(),
        });
    }
    let density_t = law.density(t);
    let mut sum = 0.0;
    let mut count = 0usize;
    for (&e, &obs) in errors.iter().zip(observed) {
        if !obs {
            continue;
        }
        count += 1;
        let indicator = if e <= t { 1.0 } else { 0.0 };
        sum += indicator + density_t * (e + 0.5 * t * (e * e - 1.0));
    }
    if count == 0 {
        return Err(Error::NoCompleteCases);
    }
    Ok(sum / count as f64)
}

/// `max_t |A(t) - B(t)|` over a shared grid — the finite-grid surrogate for
/// the supremum distance over the real line.
pub fn sup_distance(a: &EdfCurve, b: &EdfCurve) -> Result<f64> {
    if a.grid.len() != b.grid.len() || a.grid.iter().zip(&b.grid).any(|(x, y)| x != y) {
        return Err(Error::GridMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// A strictly increasing grid `min, min + step, ..., max` (inclusive, up to
/// rounding of the step count).
pub fn regular_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max > min) {
        return Err(Error::InvalidConfig(
            "grid needs max > min and a positive step".into(),
        ));
    }
    let count = ((max - min) / step).round() as usize;
    Ok((0..=count).map(|i| min + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::StandardNormal;
    use crate::localpoly::DataRow;

    fn residuals(values: &[f64]) -> ResidualSet {
        ResidualSet::new(values.to_vec()).unwrap()
    }

    #[test]
    fn edf_counts_with_ties() {
        let r = residuals(&[-1.0, 0.0, 1.0]);
        assert!((edf_evaluate(&r, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(edf_evaluate(&r, -1.5), 0.0);
        assert_eq!(edf_evaluate(&r, 1.0), 1.0);

        let ties = residuals(&[0.0, 0.0, 0.0]);
        assert_eq!(edf_evaluate(&ties, 0.0), 1.0);
        assert_eq!(edf_evaluate(&ties, -1e-12), 0.0);
    }

    #[test]
    fn curve_on_grids() {
        let r = residuals(&[0.0]);
        let curve = edf_curve(&r, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(curve.values(), &[0.0, 1.0, 1.0]);

        let empty = edf_curve(&r, &[]).unwrap();
        assert!(empty.is_empty());

        let wide = edf_curve(&r, &[-1e9, 1e9]).unwrap();
        assert_eq!(wide.values(), &[0.0, 1.0]);

        assert!(matches!(
            edf_curve(&r, &[0.0, 0.0]),
            Err(Error::UnsortedGrid)
        ));
    }

    #[test]
    fn noiseless_pipeline_gives_zero_residuals() {
        // y = r(x) exactly with deg(r) = 1, so y^2 has degree 2 and both
        // moment fits are exact; the variance estimate collapses to the
        // floor and residuals vanish
        let poly = |x: f64| 1.0 + 0.5 * x;
        let rows: Vec<DataRow> = (0..9)
            .map(|i| {
                let x = -1.0 + 0.25 * i as f64;
                DataRow::observed(vec![x], poly(x))
            })
            .collect();
        let data = Dataset::new(rows).unwrap();
        let cfg = SmootherConfig::new(1, 2, 1.5).unwrap();
        let (set, diagnostics) = complete_case_residuals(&data, &cfg).unwrap();
        assert_eq!(set.len(), 9);
        for &v in set.values() {
            assert!(v.abs() < 1e-6, "residual {v}");
        }
        assert_eq!(diagnostics.clamp_count, 9);
    }

    #[test]
    fn all_missing_is_an_error() {
        let data = Dataset::new(vec![DataRow::missing(vec![0.0])]).unwrap();
        let cfg = SmootherConfig::new(1, 0, 1.0).unwrap();
        assert!(matches!(
            complete_case_residuals(&data, &cfg),
            Err(Error::NoCompleteCases)
        ));
    }

    #[test]
    fn corrupting_missing_responses_changes_nothing() {
        let mut rows = vec![
            DataRow::observed(vec![0.1], 1.2),
            DataRow::observed(vec![-0.2], 0.8),
            DataRow::observed(vec![0.3], 1.5),
            DataRow::observed(vec![-0.4], 0.6),
            DataRow::missing(vec![0.05]),
            DataRow::missing(vec![-0.15]),
        ];
        let cfg = SmootherConfig::new(1, 1, 2.0).unwrap();
        let base = complete_case_residuals(&Dataset::new(rows.clone()).unwrap(), &cfg).unwrap();
        rows[4].y = 1e9;
        rows[5].y = -4.2e7;
        let corrupted = complete_case_residuals(&Dataset::new(rows).unwrap(), &cfg).unwrap();
        assert_eq!(base.0, corrupted.0);
    }

    #[test]
    fn oracle_reference_values() {
        let law = StandardNormal;
        // all errors zero, all observed, t = 0: 1 + f(0) * 0 = 1
        let v = expansion_oracle(&[0.0, 0.0], &[true, true], &law, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // single e = 1, t = 0: 0 + f(0) * 1
        let v = expansion_oracle(&[1.0], &[true], &law, 0.0).unwrap();
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-12);
        // nothing observed
        assert!(matches!(
            expansion_oracle(&[1.0], &[false], &law, 0.0),
            Err(Error::NoCompleteCases)
        ));
    }

    #[test]
    fn sup_distance_basics() {
        let r1 = residuals(&[0.0]);
        let a = edf_curve(&r1, &[-1.0, 1.0]).unwrap();
        assert_eq!(sup_distance(&a, &a).unwrap(), 0.0);

        let r2 = residuals(&[-2.0, 2.0]);
        let b = edf_curve(&r2, &[-1.0, 1.0]).unwrap();
        // a = (0, 1), b = (0.5, 0.5)
        assert!((sup_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        // both curves live in [0, 1], so the distance cannot exceed 1
        assert!(sup_distance(&a, &b).unwrap() <= 1.0);

        // (0, 1) vs (0.5, 1)
        let r3 = residuals(&[-2.0, 0.5]);
        let half_then_full = edf_curve(&r3, &[-1.0, 1.0]).unwrap();
        assert_eq!(half_then_full.values(), &[0.5, 1.0]);
        assert!((sup_distance(&a, &half_then_full).unwrap() - 0.5).abs() < 1e-15);

        let c = edf_curve(&r2, &[-1.0, 0.5]).unwrap();
        assert!(matches!(sup_distance(&a, &c), Err(Error::GridMismatch)));
    }

    #[test]
    fn regular_grid_endpoints() {
        let g = regular_grid(-5.0, 5.0, 0.01).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], -5.0);
        assert!((g[1000] - 5.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}

//! Randomized invariants backing the deterministic unit tests.

use proptest::prelude::*;
use resedf::edf::{complete_case_residuals, edf_curve, edf_evaluate, ResidualSet};
use resedf::localpoly::{
    fit_conditional_moment, kernel_weight, multi_index_set, wls_solve, DataRow, Dataset,
    KernelSpec, MomentPower, SmootherConfig,
};

/// A brute-force normal-equations solve by Gaussian elimination with partial
/// pivoting, independent of the library's eigendecomposition path. Only
/// valid on clearly full-rank systems.
#[allow(clippy::needless_range_loop)]
fn gaussian_elimination_wls(rows: &[Vec<f64>], weights: &[f64], targets: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for ((row, &w), &t) in rows.iter().zip(weights).zip(targets) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += w * row[i] * row[j];
            }
            a[i][p] += w * row[i] * t;
        }
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for i in 0..p {
            if i != col {
                let factor = a[i][col] / a[col][col];
                for j in col..=p {
                    a[i][j] -= factor * a[col][j];
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edf_curves_are_monotone_unit_range(
        values in prop::collection::vec(-50.0f64..50.0, 1..60),
        start in -60.0f64..50.0,
    ) {
        let res = ResidualSet::new(values.clone()).unwrap();
        let grid: Vec<f64> = (0..40).map(|i| start + i as f64 * 0.7).collect();
        let curve = edf_curve(&res, &grid).unwrap();
        prop_assert!(curve.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(curve.values().iter().all(|&v| (0.0..=1.0).contains(&v)));

        // exact endpoints of the step function
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert_eq!(edf_evaluate(&res, max), 1.0);
        prop_assert_eq!(edf_evaluate(&res, min - 1e-9), 0.0);
    }

    #[test]
    fn kernel_weights_are_nonnegative_with_product_support(
        u1 in -3.0f64..3.0,
        u2 in -3.0f64..3.0,
        bandwidth in 0.1f64..2.5,
    ) {
        let kernel = KernelSpec::tricube(2);
        let w = kernel_weight(&kernel, &[u1, u2], bandwidth);
        prop_assert!(w >= 0.0);
        let inside = u1.abs() < bandwidth && u2.abs() < bandwidth;
        prop_assert_eq!(w > 0.0, inside);
    }

    #[test]
    fn wls_matches_an_independent_solver(
        seedlings in prop::collection::vec((-2.0f64..2.0, 0.1f64..3.0, -5.0f64..5.0), 8..24),
    ) {
        // rows (1, x, x^2) are full rank whenever >= 3 distinct x, which the
        // jitter below guarantees
        let rows: Vec<Vec<f64>> = seedlings
            .iter()
            .enumerate()
            .map(|(i, (x, _, _))| {
                let x = x + i as f64 * 0.11;
                vec![1.0, x, x * x]
            })
            .collect();
        let weights: Vec<f64> = seedlings.iter().map(|(_, w, _)| *w).collect();
        let targets: Vec<f64> = seedlings.iter().map(|(_, _, t)| *t).collect();
        let sol = wls_solve(&rows, &weights, &targets).unwrap();
        prop_assert!(!sol.rank_deficient);
        let oracle = gaussian_elimination_wls(&rows, &weights, &targets);
        for (a, b) in sol.coefficients.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-7 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn multi_index_sets_are_complete_and_graded(m in 1usize..4, d in 0usize..5) {
        let set = multi_index_set(m, d);
        // size binomial(m + d, d), computed independently
        let mut expected = 1usize;
        for i in 1..=d {
            expected = expected * (m + i) / i;
        }
        prop_assert_eq!(set.len(), expected);
        prop_assert!(set[0].is_constant());
        prop_assert!(set.iter().all(|i| i.order() <= d && i.dimension() == m));
        let orders: Vec<usize> = set.iter().map(|i| i.order()).collect();
        let mut sorted = orders.clone();
        sorted.sort_unstable();
        prop_assert_eq!(orders, sorted);
        let mut unique = set.clone();
        unique.sort_by(|a, b| a.entries().cmp(b.entries()));
        unique.dedup();
        prop_assert_eq!(unique.len(), set.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corrupting_missing_responses_never_changes_residuals(
        xs in prop::collection::vec(-1.0f64..1.0, 6..14),
        noise in prop::collection::vec(-0.5f64..0.5, 6..14),
        junk in prop::collection::vec(-1e9f64..1e9, 3),
    ) {
        let n = xs.len().min(noise.len());
        let mut rows: Vec<DataRow> = (0..n)
            .map(|i| DataRow::observed(vec![xs[i]], xs[i] + noise[i]))
            .collect();
        rows.push(DataRow::missing(vec![0.0]));
        rows.push(DataRow::missing(vec![0.4]));
        rows.push(DataRow::missing(vec![-0.4]));
        let cfg = SmootherConfig::new(1, 1, 2.5).unwrap();
        let base = complete_case_residuals(&Dataset::new(rows.clone()).unwrap(), &cfg).unwrap();

        let m = rows.len();
        for (slot, value) in rows[m - 3..].iter_mut().zip(&junk) {
            slot.y = *value;
        }
        let corrupted = complete_case_residuals(&Dataset::new(rows).unwrap(), &cfg).unwrap();
        prop_assert_eq!(base.0, corrupted.0);
    }

    #[test]
    fn far_away_rows_are_inert(
        xs in prop::collection::vec(-0.4f64..0.4, 5..10),
        ys in prop::collection::vec(-2.0f64..2.0, 5..10),
        far_y in -1e6f64..1e6,
    ) {
        let n = xs.len().min(ys.len());
        let mut rows: Vec<DataRow> = (0..n)
            .map(|i| DataRow::observed(vec![xs[i]], ys[i]))
            .collect();
        // outside every window reachable from x0 = 0 even at the cap (4 * 0.5)
        rows.push(DataRow::observed(vec![30.0], 1.0));
        let cfg = SmootherConfig::new(1, 0, 0.5).unwrap();
        let data = Dataset::new(rows.clone()).unwrap();
        let (base, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();

        let last = rows.len() - 1;
        rows[last].y = far_y;
        let data2 = Dataset::new(rows).unwrap();
        let (same, _) = fit_conditional_moment(&data2, &[0.0], &cfg, MomentPower::First).unwrap();
        prop_assert_eq!(base, same);
    }

    #[test]
    fn shuffling_rows_leaves_estimates_unchanged(
        pairs in prop::collection::vec((-1.0f64..1.0, -2.0f64..2.0), 6..12),
        seed in 0u64..1000,
    ) {
        let rows: Vec<DataRow> = pairs
            .iter()
            .map(|(x, y)| DataRow::observed(vec![*x], *y))
            .collect();
        let cfg = SmootherConfig::new(1, 1, 2.0).unwrap();
        let data = Dataset::new(rows.clone()).unwrap();
        let (base, _) = fit_conditional_moment(&data, &[0.0], &cfg, MomentPower::First).unwrap();

        // Fisher-Yates with a toy linear-congruential sequence
        let mut shuffled = rows;
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let data2 = Dataset::new(shuffled).unwrap();
        let (same, _) = fit_conditional_moment(&data2, &[0.0], &cfg, MomentPower::First).unwrap();
        // summation order changes, so agreement is to rounding, not bits
        prop_assert!((base - same).abs() <= 1e-10 * base.abs().max(1.0), "{base} vs {same}");
    }
}

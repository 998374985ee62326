//! How close the residual EDF tracks its asymptotic linearization.
//!
//! The estimator admits a uniform expansion: replacing the fitted residuals
//! by the latent errors plus a density-weighted first-order term leaves a
//! remainder that shrinks faster than n^{-1/2}. This program measures
//! `sqrt(n) * sup_t |F_hat(t) - linearization(t)|` across sample sizes; the
//! medians should drift downward.
//!
//! Run with: cargo run --release --example expansion_diagnostic

use resedf::edf::{complete_case_residuals, edf_evaluate, expansion_oracle, regular_grid};
use resedf::efficiency::StandardNormal;
use resedf::localpoly::{bandwidth_rule, SmootherConfig};
use resedf::simulation::{derive_stream, generate_sample, TrueModel};

fn main() {
    let model = TrueModel::default();
    let law = StandardNormal;
    let grid = regular_grid(-5.0, 5.0, 0.01).unwrap();
    let replications = 10u64;

    println!("sqrt(n) * sup_t |F_hat - linearization|, {replications} replications per n\n");
    println!("{:>6} {:>9} {:>9} {:>9}", "n", "median", "min", "max");
    for n in [200usize, 400, 800, 1600] {
        let mut stats: Vec<f64> = (0..replications)
            .map(|k| {
                let mut stream = derive_stream(99, n as u64, k, 0);
                let sample = generate_sample(&model, n, &mut stream);
                let cfg = SmootherConfig::new(2, 3, bandwidth_rule(n).unwrap()).unwrap();
                let (residuals, _) = complete_case_residuals(&sample.dataset, &cfg).unwrap();
                let observed: Vec<bool> =
                    sample.dataset.rows().iter().map(|r| r.observed).collect();
                let sup = grid
                    .iter()
                    .map(|&t| {
                        let fitted = edf_evaluate(&residuals, t);
                        let oracle =
                            expansion_oracle(&sample.errors, &observed, &law, t).unwrap();
                        (fitted - oracle).abs()
                    })
                    .fold(0.0, f64::max);
                (n as f64).sqrt() * sup
            })
            .collect();
        stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (stats[stats.len() / 2 - 1] + stats[stats.len() / 2]);
        println!(
            "{n:>6} {median:>9.4} {:>9.4} {:>9.4}",
            stats[0],
            stats[stats.len() - 1]
        );
    }
}

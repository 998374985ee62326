//! Local polynomial estimation of a regression surface and its scale
//! function from data with missing responses.
//!
//! Draws a heteroskedastic sample over (-1, 1)^2, drops about half the
//! responses at random, and compares the complete-case smoother output
//! against the functions that generated the data.
//!
//! Run with: cargo run --release --example local_smoother

use resedf::localpoly::{
    bandwidth_rule, estimate_sigma, fit_conditional_moment, MomentPower, SmootherConfig,
};
use resedf::simulation::{derive_stream, generate_dataset, TrueModel};

fn main() {
    let model = TrueModel::default();
    let n = 2000;
    let mut stream = derive_stream(42, n as u64, 0, 0);
    let data = generate_dataset(&model, n, &mut stream);
    println!(
        "sample: n = {} rows, N = {} complete cases",
        data.len(),
        data.complete_case_count()
    );

    let cfg = SmootherConfig::new(2, 3, bandwidth_rule(n).unwrap()).unwrap();
    println!(
        "smoother: degree {}, bandwidth {:.4}, tricube product kernel\n",
        cfg.degree, cfg.bandwidth
    );

    println!("{:>12} {:>9} {:>9} {:>11} {:>11} {:>7}", "point", "r_hat", "r", "sigma_hat", "sigma", "window");
    for (x1, x2) in [(0.0, 0.0), (0.5, -0.5), (-0.7, 0.3), (0.9, 0.9), (-0.9, -0.9)] {
        let x0 = [x1, x2];
        let (r_hat, diag) =
            fit_conditional_moment(&data, &x0, &cfg, MomentPower::First).unwrap();
        let (sigma_hat, _) = estimate_sigma(&data, &x0, &cfg).unwrap();
        println!(
            "({:+.2},{:+.2}) {:>9.4} {:>9.4} {:>11.4} {:>11.4} {:>7}",
            x1,
            x2,
            r_hat,
            model.regression(x1, x2),
            sigma_hat,
            model.scale(x1, x2),
            diag.effective_count,
        );
    }
    println!("\nwindow = complete cases with positive kernel weight at that point");
}

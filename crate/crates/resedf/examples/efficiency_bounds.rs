//! The asymptotic precision of the residual EDF under missingness.
//!
//! Prints the influence-function variance at a few points, the AMISE over
//! the conventional grid, and shows the exact inverse scaling in the
//! observation rate: observing twice as many responses halves every
//! asymptotic variance.
//!
//! Run with: cargo run --release --example efficiency_bounds

use resedf::edf::regular_grid;
use resedf::efficiency::{
    edf_amise, edf_asymptotic_variance, edf_influence, jd_inverse, MissingnessSummary,
    StandardNormal,
};

fn main() {
    let law = StandardNormal;
    let points = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    let grid = regular_grid(-5.0, 5.0, 0.01).unwrap();

    println!("asymptotic variance of sqrt(n) (F_hat(t) - F(t)), standard normal errors\n");
    print!("{:>14}", "E[delta]");
    for t in points {
        print!(" {t:>8}");
    }
    println!(" {:>8}", "amise");
    for rate in [0.25, 0.5, 1.0] {
        let miss = MissingnessSummary::new(rate).unwrap();
        print!("{rate:>14}");
        for t in points {
            print!(" {:>8.4}", edf_asymptotic_variance(&law, &miss, t).unwrap());
        }
        println!(" {:>8.4}", edf_amise(&law, &miss, &grid).unwrap());
    }

    println!("\nper-observation influence at t = 0, E[delta] = 0.5:");
    let miss = MissingnessSummary::new(0.5).unwrap();
    for (observed, e) in [(true, -1.0), (true, 0.5), (true, 2.0), (false, 0.5)] {
        println!(
            "  delta = {}, e = {e:+.1}: {:+.4}",
            observed as u8,
            edf_influence(&law, &miss, observed, e, 0.0)
        );
    }

    println!("\nmoment matrix at the normal (third moment 0, fourth moment 3):");
    let m = jd_inverse(0.0, 3.0).unwrap();
    println!("  [{:.1} {:.1}; {:.1} {:.1}]", m[0][0], m[0][1], m[1][0], m[1][1]);
}

//! A desk-scale run of the Monte Carlo study.
//!
//! Reproduces the structure of the full benchmark tables — scaled bias and
//! variance, scaled MSE and MISE, and the infinite-sample reference row —
//! with a reduced replication count so it finishes in seconds. Increase
//! `replications` to 1000 to reproduce the full tables.
//!
//! Run with: cargo run --release --example simulation_study

use resedf::simulation::{run_study, StudyConfig, TrueModel};
use std::time::Instant;

fn main() {
    let model = TrueModel::default();
    let cfg = StudyConfig {
        sample_sizes: vec![100, 200, 500],
        replications: 100,
        ..StudyConfig::default()
    };
    println!(
        "running {} replications at n in {:?} (seed {}) ...",
        cfg.replications, cfg.sample_sizes, cfg.master_seed
    );
    let start = Instant::now();
    let out = run_study(&model, &cfg).unwrap();
    println!("done in {:.1?}\n", start.elapsed());

    println!("scaled bias (variance) of F_hat:\n");
    print!("{:>6}", "n");
    for &t in &cfg.evaluation_points {
        print!(" {:>18}", format!("t = {t}"));
    }
    println!();
    for table in &out.tables {
        print!("{:>6}", table.sample_size);
        for row in &table.rows {
            print!(
                " {:>18}",
                format!("{:+.4} ({:.4})", row.scaled_bias, row.scaled_variance)
            );
        }
        println!();
    }

    println!("\nscaled MSE and MISE:\n");
    print!("{:>6}", "n");
    for &t in &cfg.evaluation_points {
        print!(" {:>9}", format!("t = {t}"));
    }
    println!(" {:>9}", "mise");
    for table in &out.tables {
        print!("{:>6}", table.sample_size);
        for row in &table.rows {
            print!(" {:>9.4}", row.scaled_mse);
        }
        println!(" {:>9.4}", table.scaled_mise);
    }
    print!("{:>6}", "inf");
    for (_, v) in &out.asymptotic.rows {
        print!(" {v:>9.4}");
    }
    println!(" {:>9.4}", out.asymptotic.amise);
    println!(
        "\nobservation rate E[delta] = {:.4} (by quadrature over the covariate law)",
        out.asymptotic.observation_rate
    );
}

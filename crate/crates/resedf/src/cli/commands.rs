//! The three subcommands behind the `resedf` binary.

use super::config::ConfigFile;
use super::ingest::ingest_dataset;
use crate::edf::{complete_case_residuals, edf_curve, regular_grid};
use crate::efficiency::{
    edf_amise, edf_asymptotic_variance, MissingnessSummary, StandardNormal,
};
use crate::localpoly::{bandwidth_rule, SmootherConfig};
use crate::simulation::{run_study, Bandwidth, StudyConfig, StudyOutput, TrueModel};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct EstimateArgs {
    pub data: PathBuf,
    pub config: PathBuf,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub workers_override: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct EfficiencyArgs {
    pub config: PathBuf,
    pub out: PathBuf,
}

/// Estimates the residual EDF on a user dataset and writes the curve plus a
/// diagnostics trailer.
pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let data = ingest_dataset(&args.data)?;

    let mut cfg = ConfigFile::load(&args.config)?;
    let degree = cfg.parse_usize("degree")?.unwrap_or(3);
    let bandwidth = match cfg.take("bandwidth") {
        None => bandwidth_rule(data.len().max(2))?,
        Some((v, _)) if v == "auto" => bandwidth_rule(data.len().max(2))?,
        Some((v, line)) => v.parse::<f64>().map_err(|_| Error::DataFormat {
            path: args.config.display().to_string(),
            line,
            message: format!("key `bandwidth`: `{v}` is not a number or `auto`"),
        })?,
    };
    let variance_floor = cfg.parse_f64("variance_floor")?.unwrap_or(1e-6);
    let escalation_cap = cfg.parse_f64("bandwidth_cap")?.unwrap_or(4.0);
    let grid_min = cfg.parse_f64("grid_min")?.unwrap_or(-5.0);
    let grid_max = cfg.parse_f64("grid_max")?.unwrap_or(5.0);
    let grid_step = cfg.parse_f64("grid_step")?.unwrap_or(0.01);
    cfg.ensure_consumed()?;

    let mut smoother = SmootherConfig::new(data.dimension(), degree, bandwidth)?;
    smoother.variance_floor = variance_floor;
    smoother.escalation_cap = escalation_cap;
    smoother.validate()?;

    let (residuals, diagnostics) = complete_case_residuals(&data, &smoother)?;
    let grid = regular_grid(grid_min, grid_max, grid_step)?;
    let curve = edf_curve(&residuals, &grid)?;

    let mut out = String::from("t,F_hat\n");
    for (t, v) in curve.points() {
        let _ = writeln!(out, "{},{}", format_num(t), format_num(v));
    }
    out.push_str("# diagnostics\n");
    let _ = writeln!(out, "# n,{}", data.len());
    let _ = writeln!(out, "# N,{}", residuals.len());
    let _ = writeln!(out, "# bandwidth,{}", format_num(bandwidth));
    let _ = writeln!(out, "# clamp_count,{}", diagnostics.clamp_count);
    let _ = writeln!(out, "# rank_fallback_count,{}", diagnostics.rank_fallback_count);
    let _ = writeln!(out, "# escalation_count,{}", diagnostics.escalation_count);
    std::fs::write(&args.out, out)?;
    Ok(())
}

/// Runs the Monte Carlo study and writes the two summary tables.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut file = ConfigFile::load(&args.config)?;
    let mut cfg = StudyConfig::default();
    if let Some(sizes) = file.parse_usize_list("sample_sizes")? {
        cfg.sample_sizes = sizes;
    }
    if let Some(r) = file.parse_usize("replications")? {
        cfg.replications = r;
    }
    if let Some(points) = file.parse_f64_list("evaluation_points")? {
        cfg.evaluation_points = points;
    }
    let mise_min = file.parse_f64("mise_grid_min")?.unwrap_or(-5.0);
    let mise_max = file.parse_f64("mise_grid_max")?.unwrap_or(5.0);
    let mise_step = file.parse_f64("mise_grid_step")?.unwrap_or(0.01);
    cfg.mise_grid = regular_grid(mise_min, mise_max, mise_step)?;
    if let Some(seed) = file.parse_u64("seed")? {
        cfg.master_seed = seed;
    }
    if let Some(degree) = file.parse_usize("degree")? {
        cfg.degree = degree;
    }
    match file.take("bandwidth") {
        None => {}
        Some((v, _)) if v == "auto" => cfg.bandwidth = Bandwidth::Auto,
        Some((v, line)) => {
            let b = v.parse::<f64>().map_err(|_| Error::DataFormat {
                path: args.config.display().to_string(),
                line,
                message: format!("key `bandwidth`: `{v}` is not a number or `auto`"),
            })?;
            cfg.bandwidth = Bandwidth::Fixed(b);
        }
    }
    if let Some(w) = file.parse_usize("workers")? {
        cfg.workers = w;
    }
    file.ensure_consumed()?;

    if let Some(seed) = args.seed_override {
        cfg.master_seed = seed;
    }
    if let Some(workers) = args.workers_override {
        cfg.workers = workers;
    }
    cfg.validate()?;

    let model = TrueModel::default();
    let output = run_study(&model, &cfg)?;

    std::fs::create_dir_all(&args.out_dir)?;
    std::fs::write(args.out_dir.join("table1.csv"), render_table1(&output, &cfg))?;
    std::fs::write(args.out_dir.join("table2.csv"), render_table2(&output, &cfg))?;
    Ok(())
}

fn render_table1(output: &StudyOutput, cfg: &StudyConfig) -> String {
    let mut s = String::from("n");
    for &t in &cfg.evaluation_points {
        let _ = write!(s, ",bias[{t}],variance[{t}]");
    }
    s.push('\n');
    for table in &output.tables {
        let _ = write!(s, "{}", table.sample_size);
        for row in &table.rows {
            let _ = write!(
                s,
                ",{},{}",
                format_num(row.scaled_bias),
                format_num(row.scaled_variance)
            );
        }
        s.push('\n');
    }
    s
}

fn render_table2(output: &StudyOutput, cfg: &StudyConfig) -> String {
    let mut s = String::from("n");
    for &t in &cfg.evaluation_points {
        let _ = write!(s, ",amse[{t}]");
    }
    s.push_str(",amise\n");
    for table in &output.tables {
        let _ = write!(s, "{}", table.sample_size);
        for row in &table.rows {
            let _ = write!(s, ",{}", format_num(row.scaled_mse));
        }
        let _ = writeln!(s, ",{}", format_num(table.scaled_mise));
    }
    s.push_str("inf");
    for &(_, v) in &output.asymptotic.rows {
        let _ = write!(s, ",{}", format_num(v));
    }
    let _ = writeln!(s, ",{}", format_num(output.asymptotic.amise));
    s
}

/// Writes the asymptotic variance curve and AMISE for a configured
/// observation rate (standard normal errors).
pub fn cmd_efficiency(args: &EfficiencyArgs) -> Result<()> {
    let mut file = ConfigFile::load(&args.config)?;
    let e_delta = file.parse_f64("e_delta")?.unwrap_or(0.5);
    let grid_min = file.parse_f64("grid_min")?.unwrap_or(-5.0);
    let grid_max = file.parse_f64("grid_max")?.unwrap_or(5.0);
    let grid_step = file.parse_f64("grid_step")?.unwrap_or(0.01);
    file.ensure_consumed()?;

    let law = StandardNormal;
    let miss = MissingnessSummary::new(e_delta)?;
    let grid = regular_grid(grid_min, grid_max, grid_step)?;

    let mut out = String::from("t,amse\n");
    for &t in &grid {
        let v = edf_asymptotic_variance(&law, &miss, t)?;
        let _ = writeln!(out, "{},{}", format_num(t), format_num(v));
    }
    let amise = edf_amise(&law, &miss, &grid)?;
    let _ = writeln!(out, "amise,{}", format_num(amise));
    std::fs::write(&args.out, out)?;
    Ok(())
}

/// Renders to 6 significant digits, trailing zeros trimmed.
pub(crate) fn format_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Shared by `run` for exit-code mapping: 2 for data problems, 3 for
/// numerical failures.
pub(crate) fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DataFormat { .. }
        | Error::Io(_)
        | Error::InvalidConfig(_)
        | Error::InvalidLaw(_)
        | Error::UnsortedGrid
        | Error::GridMismatch
        | Error::DimensionMismatch { .. }
        | Error::NoCompleteCases => 2,
        Error::InsufficientData { .. }
        | Error::EmptyWindow
        | Error::DegenerateMoments(_)
        | Error::VanishingDensity(_)
        | Error::QuadratureDivergence { .. } => 3,
    }
}

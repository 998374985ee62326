//! A reproducible Monte Carlo study of the residual EDF under missingness
//! at random.
//!
//! Data are drawn from `Y = r(X) + sigma(X) e` with `X` uniform on
//! `(-1, 1)^2`, standard normal errors, and responses observed with
//! probability `pi(X)`. Each replication fits the smoothers, forms the
//! residual EDF, and evaluates it on two grids; the summaries scale bias by
//! `sqrt(n)` and variance/MSE by `n`, which the theory predicts to be stable
//! in `n`, and append the infinite-sample reference computed from the
//! efficiency calculus.
//!
//! Replications are independent tasks keyed by `(seed, n, k)`; they may run
//! on any number of workers and are merged by index, so the entire study
//! output is a pure function of its configuration.

mod rng;

pub use rng::{derive_stream, Stream};

use crate::edf::{complete_case_residuals, edf_evaluate, regular_grid};
use crate::efficiency::{
    edf_amise, edf_asymptotic_variance, quadrature_2d, ErrorLaw, MissingnessSummary,
    StandardNormal,
};
use crate::localpoly::{bandwidth_rule, DataRow, Dataset, SmootherConfig};
use crate::{Error, Result};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// The data-generating process: regression, scale, and observation
/// probability over `(-1, 1)^2`, with standard normal errors.
pub struct TrueModel {
    regression: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    scale: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    observe_probability: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl TrueModel {
    /// Builds a model, checking on a grid over the domain that the scale is
    /// positive and the observation probability lies strictly inside (0, 1).
    pub fn new(
        regression: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        scale: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        observe_probability: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let steps = 41;
        for i in 0..steps {
            for j in 0..steps {
                let x1 = -1.0 + 2.0 * i as f64 / (steps - 1) as f64;
                let x2 = -1.0 + 2.0 * j as f64 / (steps - 1) as f64;
                if !(scale(x1, x2) > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "scale is not positive at ({x1}, {x2})"
                    )));
                }
                let p = observe_probability(x1, x2);
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "observation probability {p} at ({x1}, {x2}) is outside (0, 1)"
                    )));
                }
            }
        }
        Ok(Self {
            regression: Box::new(regression),
            scale: Box::new(scale),
            observe_probability: Box::new(observe_probability),
        })
    }

    pub fn regression(&self, x1: f64, x2: f64) -> f64 {
        (self.regression)(x1, x2)
    }

    pub fn scale(&self, x1: f64, x2: f64) -> f64 {
        (self.scale)(x1, x2)
    }

    pub fn observe_probability(&self, x1: f64, x2: f64) -> f64 {
        (self.observe_probability)(x1, x2)
    }

    /// `E[delta] = E[pi(X)]` under the uniform covariate law, by quadrature.
    pub fn observation_rate(&self) -> Result<f64> {
        let integral = quadrature_2d(
            |x1, x2| self.observe_probability(x1, x2),
            (-1.0, 1.0),
            (-1.0, 1.0),
            1e-8,
        )?;
        Ok(integral / 4.0)
    }
}

impl Default for TrueModel {
    /// The benchmark model: `r = 1 + x1 - x2 + 2 exp(-sqrt(x1^2 + x2^2)/2)`,
    /// `sigma = sqrt(1 + 2 x1^2 + 2 x2^2)`, and
    /// `pi = 1 - 1/(1 + exp(-(x1 + x2)/2))`, which observes about half the
    /// responses.
    fn default() -> Self {
        Self::new(
            |x1, x2| 1.0 + x1 - x2 + 2.0 * (-0.5 * (x1 * x1 + x2 * x2).sqrt()).exp(),
            |x1, x2| (1.0 + 2.0 * x1 * x1 + 2.0 * x2 * x2).sqrt(),
            |x1, x2| 1.0 - 1.0 / (1.0 + (-(x1 + x2) / 2.0).exp()),
        )
        .expect("benchmark model is valid")
    }
}

/// How the smoother bandwidth is chosen per sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `3 (n log n)^{-1/7}`
    Auto,
    Fixed(f64),
}

impl Bandwidth {
    pub fn for_sample_size(&self, n: usize) -> Result<f64> {
        match *self {
            Bandwidth::Auto => bandwidth_rule(n),
            Bandwidth::Fixed(b) if b > 0.0 => Ok(b),
            Bandwidth::Fixed(b) => Err(Error::InvalidConfig(format!(
                "fixed bandwidth must be positive, got {b}"
            ))),
        }
    }
}

/// Configuration of the whole study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    /// Points where bias/variance/MSE are tabulated.
    pub evaluation_points: Vec<f64>,
    /// Grid carrying the MISE integral.
    pub mise_grid: Vec<f64>,
    pub master_seed: u64,
    /// Local polynomial degree.
    pub degree: usize,
    pub bandwidth: Bandwidth,
    /// Worker threads for the replication loop; 0 means all available cores.
    pub workers: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            sample_sizes: vec![100, 200, 500, 1000],
            replications: 1000,
            evaluation_points: vec![-3.0, -2.0, -1.0, 0.0],
            mise_grid: regular_grid(-5.0, 5.0, 0.01).expect("static grid"),
            master_seed: 1729,
            degree: 3,
            bandwidth: Bandwidth::Auto,
            workers: 0,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes".into()));
        }
        if self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidConfig("sample sizes must be at least 2".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("need at least one replication".into()));
        }
        if self.evaluation_points.is_empty() {
            return Err(Error::InvalidConfig("no evaluation points".into()));
        }
        if self.evaluation_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedGrid);
        }
        if self.mise_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedGrid);
        }
        Ok(())
    }

    fn resolved_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
        }
    }

    fn smoother_config(&self, n: usize) -> Result<SmootherConfig> {
        SmootherConfig::new(2, self.degree, self.bandwidth.for_sample_size(n)?)
    }
}

/// A generated dataset together with the latent errors that produced it,
/// which oracle-style diagnostics need.
pub struct GeneratedSample {
    pub dataset: Dataset,
    /// One latent error per row, aligned with the dataset rows.
    pub errors: Vec<f64>,
}

/// Draws `n` rows `(x, delta * y, delta)` from the model. Missing responses
/// are stored as 0 and carry no information.
pub fn generate_sample(model: &TrueModel, n: usize, stream: &mut Stream) -> GeneratedSample {
    let mut rows = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = stream.uniform_in(-1.0, 1.0);
        let x2 = stream.uniform_in(-1.0, 1.0);
        let e = stream.standard_normal();
        let observed = stream.bernoulli(model.observe_probability(x1, x2));
        errors.push(e);
        if observed {
            let y = model.regression(x1, x2) + model.scale(x1, x2) * e;
            rows.push(DataRow::observed(vec![x1, x2], y));
        } else {
            rows.push(DataRow::missing(vec![x1, x2]));
        }
    }
    let dataset = Dataset::with_bounds(rows, vec![(-1.0, 1.0), (-1.0, 1.0)])
        .expect("generated rows are well-formed");
    GeneratedSample { dataset, errors }
}

/// As [`generate_sample`] but without the latent errors.
pub fn generate_dataset(model: &TrueModel, n: usize, stream: &mut Stream) -> Dataset {
    generate_sample(model, n, stream).dataset
}

/// The residual EDF of one replication, evaluated on both grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutput {
    /// EDF values at the evaluation points.
    pub point_values: Vec<f64>,
    /// EDF values on the MISE grid.
    pub grid_values: Vec<f64>,
    /// How many fresh samples were needed; 0 in the overwhelming majority of
    /// replications.
    pub resamples: usize,
}

const MAX_RESAMPLES: u64 = 32;

/// Runs replication `k` at sample size `n`: draw data, fit the smoothers,
/// form the residual EDF, evaluate. A degenerate draw (no usable window) is
/// regenerated from a fallback stream derived from the same key, so the
/// replication count stays fixed without breaking determinism.
pub fn run_replication(
    model: &TrueModel,
    n: usize,
    cfg: &StudyConfig,
    k: usize,
) -> Result<ReplicationOutput> {
    let smoother = cfg.smoother_config(n)?;
    let mut last_error = Error::NoCompleteCases;
    for attempt in 0..MAX_RESAMPLES {
        let mut stream = derive_stream(cfg.master_seed, n as u64, k as u64, attempt);
        let sample = generate_sample(model, n, &mut stream);
        match complete_case_residuals(&sample.dataset, &smoother) {
            Ok((residuals, _)) => {
                let point_values = cfg
                    .evaluation_points
                    .iter()
                    .map(|&t| edf_evaluate(&residuals, t))
                    .collect();
                let grid_values = cfg
                    .mise_grid
                    .iter()
                    .map(|&t| edf_evaluate(&residuals, t))
                    .collect();
                return Ok(ReplicationOutput {
                    point_values,
                    grid_values,
                    resamples: attempt as usize,
                });
            }
            Err(
                e @ (Error::NoCompleteCases | Error::InsufficientData { .. } | Error::EmptyWindow),
            ) => {
                last_error = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_error)
}

/// One tabulated point of a summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub t: f64,
    /// `sqrt(n) * (mean F_hat(t) - F(t))`
    pub scaled_bias: f64,
    /// `n * Var[F_hat(t)]` (sample variance across replications)
    pub scaled_variance: f64,
    /// `n * mean (F_hat(t) - F(t))^2`
    pub scaled_mse: f64,
}

/// Scaled summaries of one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub sample_size: usize,
    pub rows: Vec<SummaryRow>,
    /// Trapezoidal integral of the scaled MSE over the MISE grid.
    pub scaled_mise: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub resample_count: usize,
}

/// Collapses replication outputs into the scaled bias/variance/MSE rows and
/// the scaled MISE, measured against the true error law.
pub fn summarize<L: ErrorLaw>(
    outputs: &[ReplicationOutput],
    law: &L,
    n: usize,
    cfg: &StudyConfig,
) -> Result<SummaryTable> {
    let r = outputs.len();
    if r < 2 {
        return Err(Error::InvalidConfig(
            "summaries need at least 2 replications".into(),
        ));
    }
    let nf = n as f64;
    let rows = cfg
        .evaluation_points
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let truth = law.cdf(t);
            let values = outputs.iter().map(|o| o.point_values[i]);
            let (bias, variance, mse) = scaled_statistics(values, truth, r, nf);
            SummaryRow { t, scaled_bias: bias, scaled_variance: variance, scaled_mse: mse }
        })
        .collect();

    let grid_mse: Vec<f64> = (0..cfg.mise_grid.len())
        .map(|j| {
            let truth = law.cdf(cfg.mise_grid[j]);
            let values = outputs.iter().map(|o| o.grid_values[j]);
            scaled_statistics(values, truth, r, nf).2
        })
        .collect();
    let scaled_mise = if cfg.mise_grid.len() >= 2 {
        crate::efficiency::trapezoid(&cfg.mise_grid, &grid_mse)
    } else {
        0.0
    };

    Ok(SummaryTable {
        sample_size: n,
        rows,
        scaled_mise,
        replications: r,
        master_seed: cfg.master_seed,
        resample_count: outputs.iter().map(|o| o.resamples).sum(),
    })
}

fn scaled_statistics(
    values: impl Iterator<Item = f64> + Clone,
    truth: f64,
    r: usize,
    n: f64,
) -> (f64, f64, f64) {
    let rf = r as f64;
    let mean = values.clone().sum::<f64>() / rf;
    let centered: f64 = values.clone().map(|v| (v - mean) * (v - mean)).sum();
    let against_truth: f64 = values.map(|v| (v - truth) * (v - truth)).sum();
    let bias = n.sqrt() * (mean - truth);
    let variance = n * centered / (rf - 1.0);
    let mse = n * against_truth / rf;
    (bias, variance, mse)
}

/// The infinite-sample reference row.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSummary {
    /// `(t, asymptotic variance)` at each evaluation point.
    pub rows: Vec<(f64, f64)>,
    pub amise: f64,
    /// `E[delta]` under the model, by quadrature.
    pub observation_rate: f64,
}

/// Everything `run_study` produces: one table per sample size plus the
/// asymptotic reference.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub tables: Vec<SummaryTable>,
    pub asymptotic: AsymptoticSummary,
}

/// Runs the full study: every `(sample size, replication)` pair, the scaled
/// summaries, and the asymptotic row. Deterministic given the configuration;
/// replications are distributed over worker threads and merged by index.
pub fn run_study(model: &TrueModel, cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let law = StandardNormal;
    let workers = cfg.resolved_workers();

    let mut tables = Vec::with_capacity(cfg.sample_sizes.len());
    for &n in &cfg.sample_sizes {
        let outputs: Vec<Result<ReplicationOutput>> =
            parallel_map(cfg.replications, workers, |k| run_replication(model, n, cfg, k));
        let outputs: Vec<ReplicationOutput> =
            outputs.into_iter().collect::<Result<_>>()?;
        tables.push(summarize(&outputs, &law, n, cfg)?);
    }

    let asymptotic = asymptotic_summary(model, cfg)?;
    Ok(StudyOutput { tables, asymptotic })
}

/// The asymptotic row on its own.
pub fn asymptotic_summary(model: &TrueModel, cfg: &StudyConfig) -> Result<AsymptoticSummary> {
    let law = StandardNormal;
    let rate = model.observation_rate()?;
    let miss = MissingnessSummary::new(rate)?;
    let rows = cfg
        .evaluation_points
        .iter()
        .map(|&t| Ok((t, edf_asymptotic_variance(&law, &miss, t)?)))
        .collect::<Result<_>>()?;
    let amise = edf_amise(&law, &miss, &cfg.mise_grid)?;
    Ok(AsymptoticSummary { rows, amise, observation_rate: rate })
}

/// Applies `f` to `0..count` on `workers` threads, preserving index order in
/// the result.
pub(crate) fn parallel_map<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = {
        let mut v = Vec::with_capacity(count);
        v.extend((0..count).map(|_| None));
        Mutex::new(v)
    };
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                results.lock().expect("worker poisoned the result lock")[i] = Some(value);
            });
        }
    });
    results
        .into_inner()
        .expect("worker poisoned the result lock")
        .into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let model = TrueModel::default();
        let mut s1 = derive_stream(9, 50, 0, 0);
        let mut s2 = derive_stream(9, 50, 0, 0);
        let a = generate_sample(&model, 50, &mut s1);
        let b = generate_sample(&model, 50, &mut s2);
        assert_eq!(a.dataset.rows(), b.dataset.rows());
        assert_eq!(a.errors, b.errors);
    }

    #[test]
    fn missing_rows_store_zero() {
        let model = TrueModel::default();
        let mut s = derive_stream(11, 200, 0, 0);
        let sample = generate_sample(&model, 200, &mut s);
        let mut saw_missing = false;
        for row in sample.dataset.rows() {
            if !row.observed {
                saw_missing = true;
                assert_eq!(row.y, 0.0);
            }
        }
        assert!(saw_missing);
    }

    #[test]
    fn observation_probability_range() {
        let model = TrueModel::default();
        // extremes of pi over [-1,1]^2 sit at the corners
        let lo = model.observe_probability(1.0, 1.0);
        let hi = model.observe_probability(-1.0, -1.0);
        assert!((lo - 0.268_941_421_369_995_1).abs() < 1e-12);
        assert!((hi - 0.731_058_578_630_004_9).abs() < 1e-12);
    }

    #[test]
    fn observation_rate_is_one_half_by_symmetry() {
        let model = TrueModel::default();
        let rate = model.observation_rate().unwrap();
        assert!((rate - 0.5).abs() < 1e-7, "rate {rate}");
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(TrueModel::new(|_, _| 0.0, |x, _| x, |_, _| 0.5).is_err());
        assert!(TrueModel::new(|_, _| 0.0, |_, _| 1.0, |_, _| 1.0).is_err());
    }

    #[test]
    fn replication_is_deterministic_and_well_formed() {
        let model = TrueModel::default();
        let cfg = StudyConfig {
            replications: 2,
            sample_sizes: vec![60],
            ..StudyConfig::default()
        };
        let a = run_replication(&model, 60, &cfg, 3).unwrap();
        let b = run_replication(&model, 60, &cfg, 3).unwrap();
        assert_eq!(a, b);
        for w in a.grid_values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(a.grid_values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn summarize_identities() {
        let model = TrueModel::default();
        let cfg = StudyConfig {
            sample_sizes: vec![50],
            replications: 8,
            mise_grid: regular_grid(-3.0, 3.0, 0.5).unwrap(),
            ..StudyConfig::default()
        };
        let outputs: Vec<ReplicationOutput> = (0..8)
            .map(|k| run_replication(&model, 50, &cfg, k).unwrap())
            .collect();
        let law = StandardNormal;
        let table = summarize(&outputs, &law, 50, &cfg).unwrap();
        let r = table.replications as f64;
        for row in &table.rows {
            // mse = var (R-1)/R + bias^2, exactly up to rounding
            let reconstructed =
                row.scaled_variance * (r - 1.0) / r + row.scaled_bias * row.scaled_bias;
            assert!(
                (row.scaled_mse - reconstructed).abs() < 1e-10 * row.scaled_mse.abs().max(1.0),
                "t = {}: {} vs {reconstructed}",
                row.t,
                row.scaled_mse
            );
        }
        assert!(table.scaled_mise >= 0.0);
    }

    #[test]
    fn identical_replications_have_zero_variance() {
        let model = TrueModel::default();
        let cfg = StudyConfig {
            mise_grid: regular_grid(-2.0, 2.0, 1.0).unwrap(),
            ..StudyConfig::default()
        };
        let out = run_replication(&model, 50, &cfg, 0).unwrap();
        let outputs = vec![out.clone(), out];
        let table = summarize(&outputs, &StandardNormal, 50, &cfg).unwrap();
        for row in &table.rows {
            assert_eq!(row.scaled_variance, 0.0);
        }
    }

    #[test]
    fn degenerate_draws_resample_deterministically() {
        // with pi = 0.2 and n = 2, most draws have no complete case and the
        // replication falls back to derived streams
        let model = TrueModel::new(|_, _| 0.0, |_, _| 1.0, |_, _| 0.2).unwrap();
        let cfg = StudyConfig {
            sample_sizes: vec![2],
            mise_grid: regular_grid(-2.0, 2.0, 1.0).unwrap(),
            ..StudyConfig::default()
        };
        let mut saw_resample = false;
        for k in 0..20 {
            let out = run_replication(&model, 2, &cfg, k).unwrap();
            saw_resample |= out.resamples > 0;
            let again = run_replication(&model, 2, &cfg, k).unwrap();
            assert_eq!(out, again);
        }
        assert!(saw_resample);
    }

    #[test]
    fn summarize_needs_two_replications() {
        let model = TrueModel::default();
        let cfg = StudyConfig::default();
        let out = run_replication(&model, 50, &cfg, 0).unwrap();
        assert!(summarize(&[out], &StandardNormal, 50, &cfg).is_err());
    }

    #[test]
    fn parallel_map_preserves_order() {
        let squares = parallel_map(100, 4, |i| i * i);
        assert_eq!(squares.len(), 100);
        for (i, v) in squares.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }

    #[test]
    fn smoke_study_is_deterministic_across_worker_counts() {
        let model = TrueModel::default();
        let mut cfg = StudyConfig {
            sample_sizes: vec![40],
            replications: 4,
            mise_grid: regular_grid(-3.0, 3.0, 0.25).unwrap(),
            workers: 1,
            ..StudyConfig::default()
        };
        let serial = run_study(&model, &cfg).unwrap();
        cfg.workers = 3;
        let parallel = run_study(&model, &cfg).unwrap();
        assert_eq!(serial.tables, parallel.tables);
        assert_eq!(serial.asymptotic, parallel.asymptotic);
    }
}

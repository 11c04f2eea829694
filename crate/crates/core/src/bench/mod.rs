//! Dataset generation, experiment runs and their CSV and SVG outputs.

mod generate;
mod render;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use generate::{default_side, generate_instance, DatasetKind, GeneratorConfig, GmmParams, MAX_ATTEMPTS};
pub use render::render_svg;

use crate::error::{Error, Result};
use crate::geom::{Instance, Point};
use crate::restore::{restore, Algorithm};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub minmax: f64,
    pub total: f64,
}

/// Maximum and summed Euclidean displacement between two configurations.
pub fn compute_metrics(before: &[Point], after: &[Point]) -> Result<Metrics> {
    if before.len() != after.len() {
        return Err(Error::InvalidArgument(format!("{} original positions but {} final positions", before.len(), after.len())));
    }
    let mut minmax = 0.0f64;
    let mut total = 0.0;
    for (a, b) in before.iter().zip(after) {
        let d = a.dist(b);
        minmax = minmax.max(d);
        total += d;
    }
    Ok(Metrics { minmax, total })
}

/// Seed of trial `trial` at size `n`. Every algorithm sees the same instance.
pub fn trial_seed(seed0: u64, n: usize, trial: usize) -> u64 {
    let mut x = seed0 ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    // splitmix64 finalizer
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algos: Vec<String>,
    pub n: Vec<usize>,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub kind: DatasetKind,
    pub h: f64,
    /// `None` uses [`default_side`] for each `n`.
    pub side: Option<f64>,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algos: vec!["eascr".into(), "nb".into()],
            n: vec![8, 16, 32],
            k: 2,
            trials: 10,
            seed: 0,
            kind: DatasetKind::Uniform,
            h: 1.0,
            side: None,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("bench config: {e}")))
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        let mut algos = self.algos.iter().map(|a| a.parse()).collect::<Result<Vec<Algorithm>>>()?;
        algos.sort();
        algos.dedup();
        Ok(algos)
    }

    pub fn validate(&self) -> Result<Vec<Algorithm>> {
        let algos = self.algorithms()?;
        if algos.is_empty() || self.n.is_empty() || self.trials == 0 {
            return Err(Error::InvalidArgument("need at least one algorithm, one size and one trial".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if let Some(a) = algos.iter().find(|a| !a.supports(self.k)) {
            return Err(Error::Unsupported(format!("{a} does not support k = {}", self.k)));
        }
        if let Some(n) = self.n.iter().find(|&&n| n <= self.k) {
            return Err(Error::Infeasible { n: *n, k: self.k });
        }
        Ok(algos)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub algo: Algorithm,
    pub n: usize,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub minmax: f64,
    pub total: f64,
    pub feasible: bool,
    /// Wall-clock solve time. Kept out of the main CSV so reruns compare equal.
    pub runtime_ns: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub algo: Algorithm,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub feasible: usize,
    pub minmax_mean: f64,
    pub minmax_std: f64,
    pub total_mean: f64,
    pub total_std: f64,
    pub runtime_mean_ns: f64,
    pub runtime_std_ns: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Sorted by (algo, n, k, trial).
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<Aggregate>,
}

/// Runs every algorithm on `trials` generated instances per size.
///
/// Fails if any produced plan does not verify.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let algos = config.validate()?;
    let tasks: Vec<(usize, usize)> = config.n.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let per_task: Vec<Result<Vec<TrialRow>>> =
        pool.install(|| tasks.par_iter().map(|&(n, trial)| run_trial(config, &algos, n, trial)).collect());
    let mut rows = Vec::with_capacity(tasks.len() * algos.len());
    for r in per_task {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| (r.algo, r.n, r.k, r.trial));
    let aggregates = aggregate(&rows);
    Ok(ExperimentResult { config: config.clone(), rows, aggregates })
}

fn run_trial(config: &ExperimentConfig, algos: &[Algorithm], n: usize, trial: usize) -> Result<Vec<TrialRow>> {
    let seed = trial_seed(config.seed, n, trial);
    let gen = GeneratorConfig {
        kind: config.kind,
        n,
        h: config.h,
        side: config.side.unwrap_or_else(|| default_side(n)),
        gmm: None,
        seed,
    };
    let instance = generate_instance(&gen)?;
    algos.iter().map(|&algo| solve_row(&instance, config.k, algo, trial, seed)).collect()
}

fn solve_row(instance: &Instance, k: usize, algo: Algorithm, trial: usize, seed: u64) -> Result<TrialRow> {
    let n = instance.n();
    let start = Instant::now();
    let outcome = restore(instance, k, algo);
    let runtime_ns = start.elapsed().as_nanos();
    match outcome {
        Ok(restoration) => {
            let report = restoration.verify(instance)?;
            if !report.passed() {
                return Err(Error::InvalidArgument(format!(
                    "{algo} produced an invalid plan (n = {n}, k = {k}, seed = {seed}): {}",
                    report.summary()
                )));
            }
            let m = compute_metrics(instance.positions(), &restoration.plan.final_positions)?;
            Ok(TrialRow { algo, n, k, trial, seed, minmax: m.minmax, total: m.total, feasible: true, runtime_ns })
        }
        Err(e) => {
            log::warn!("{algo} failed on n = {n}, k = {k}, seed = {seed}: {e}");
            Ok(TrialRow { algo, n, k, trial, seed, minmax: f64::NAN, total: f64::NAN, feasible: false, runtime_ns })
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Mean and sample standard deviation per (algo, n, k), over feasible rows.
pub fn aggregate(rows: &[TrialRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Algorithm, usize, usize), Vec<&TrialRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.algo, r.n, r.k)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algo, n, k), rs)| {
            let ok: Vec<&&TrialRow> = rs.iter().filter(|r| r.feasible).collect();
            let (minmax_mean, minmax_std) = mean_std(&ok.iter().map(|r| r.minmax).collect::<Vec<_>>());
            let (total_mean, total_std) = mean_std(&ok.iter().map(|r| r.total).collect::<Vec<_>>());
            let (runtime_mean_ns, runtime_std_ns) = mean_std(&ok.iter().map(|r| r.runtime_ns as f64).collect::<Vec<_>>());
            Aggregate {
                algo,
                n,
                k,
                trials: rs.len(),
                feasible: ok.len(),
                minmax_mean,
                minmax_std,
                total_mean,
                total_std,
                runtime_mean_ns,
                runtime_std_ns,
            }
        })
        .collect()
}

/// Formats with 9 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

pub const TRIALS_CSV: &str = "trials.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const RUNTIME_CSV: &str = "runtime.csv";

impl ExperimentResult {
    pub fn trials_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["algo", "n", "k", "trial", "seed", "minmax", "total", "feasible"])?;
        for r in &self.rows {
            w.write_record([
                r.algo.name().to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                fmt_sig(r.minmax),
                fmt_sig(r.total),
                r.feasible.to_string(),
            ])?;
        }
        finish(w)
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["algo", "n", "k", "trials", "feasible", "minmax_mean", "minmax_std", "total_mean", "total_std"])?;
        for a in &self.aggregates {
            w.write_record([
                a.algo.name().to_string(),
                a.n.to_string(),
                a.k.to_string(),
                a.trials.to_string(),
                a.feasible.to_string(),
                fmt_sig(a.minmax_mean),
                fmt_sig(a.minmax_std),
                fmt_sig(a.total_mean),
                fmt_sig(a.total_std),
            ])?;
        }
        finish(w)
    }

    pub fn runtime_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["algo", "n", "k", "trial", "seed", "runtime_ns"])?;
        for r in &self.rows {
            w.write_record([
                r.algo.name().to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.runtime_ns.to_string(),
            ])?;
        }
        finish(w)
    }

    /// Writes the three CSV files into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, body) in [(TRIALS_CSV, self.trials_csv()?), (SUMMARY_CSV, self.summary_csv()?), (RUNTIME_CSV, self.runtime_csv()?)] {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn aggregate_for(&self, algo: Algorithm, n: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.algo == algo && a.n == n)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(123456.789123), "123456.789");
        assert_eq!(fmt_sig(2.0), "2");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        assert_eq!(fmt_sig(1.5e-7), "1.50000000e-7");
    }

    #[test]
    fn metrics_match_plan() {
        let a = [Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)];
        let b = [Point::new2(3.0, 4.0), Point::new2(1.0, 0.0)];
        assert_eq!(compute_metrics(&a, &b).unwrap(), Metrics { minmax: 5.0, total: 5.0 });
        assert!(compute_metrics(&a, &b[..1]).is_err());
    }

    #[test]
    fn small_experiment_is_deterministic() {
        let cfg = ExperimentConfig { algos: vec!["eascr".into(), "nb".into(), "bt".into()], n: vec![8], trials: 3, ..Default::default() };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&ExperimentConfig { jobs: 2, ..cfg }).unwrap();
        assert_eq!(a.trials_csv().unwrap(), b.trials_csv().unwrap());
        assert_eq!(a.summary_csv().unwrap(), b.summary_csv().unwrap());
        assert_eq!(a.rows.len(), 9);
        assert!(a.rows.iter().all(|r| r.feasible));
        assert_eq!(a.trials_csv().unwrap().lines().count(), 10);
        assert_eq!(a.aggregates.len(), 3);
    }

    #[test]
    fn config_errors() {
        let bt3 = ExperimentConfig { algos: vec!["bt".into()], k: 3, ..Default::default() };
        assert!(matches!(run_experiment(&bt3), Err(Error::Unsupported(_))));
        let tiny = ExperimentConfig { n: vec![2], ..Default::default() };
        assert!(matches!(run_experiment(&tiny), Err(Error::Infeasible { .. })));
        let cfg = ExperimentConfig::from_toml("algos = [\"eascr\"]\nn = [8, 16]\nk = 3\ntrials = 2\n").unwrap();
        assert_eq!(cfg.n, vec![8, 16]);
        assert_eq!(cfg.jobs, 1);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn aggregates_skip_infeasible_rows() {
        let row = |minmax: f64, feasible| TrialRow {
            algo: Algorithm::EaScr,
            n: 8,
            k: 2,
            trial: 0,
            seed: 0,
            minmax,
            total: minmax,
            feasible,
            runtime_ns: 10,
        };
        let agg = aggregate(&[row(1.0, true), row(3.0, true), row(f64::NAN, false)]);
        assert_eq!(agg[0].trials, 3);
        assert_eq!(agg[0].feasible, 2);
        assert_eq!(agg[0].minmax_mean, 2.0);
        assert!((agg[0].minmax_std - 2f64.sqrt()).abs() < 1e-12);
    }
}

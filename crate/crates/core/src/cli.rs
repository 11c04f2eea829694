//! `kconn` command-line front end.
//!
//! Exit status: 0 on success, 1 on domain errors (infeasible input, failed
//! verification, unreadable files), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::augment::AugmentationSet;
use crate::bench::{default_side, generate_instance, run_experiment, render_svg, DatasetKind, ExperimentConfig, GeneratorConfig};
use crate::connectivity::{is_k_connected, ConnectivityMethod};
use crate::error::Error;
use crate::geom::{build_comm_graph, Instance};
use crate::qcp::{build_qcp, export_qcp, ExportFormat};
use crate::relocation::{verify_plan, RestorationPlan};
use crate::restore::{restore, Algorithm};

#[derive(Debug, Parser)]
#[command(name = "kconn", version, about = "Restore k-connectivity of multi-robot communication graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a connected random instance.
    Gen(GenArgs),
    /// Test whether an instance's communication graph is k-connected.
    Check(CheckArgs),
    /// Compute a restoration plan.
    Restore(RestoreArgs),
    /// Run an experiment and write CSV results.
    Bench(BenchArgs),
    /// Export the exact quadratically constrained model.
    ExportQcp(ExportArgs),
    /// Draw an instance, optionally with a plan, as SVG.
    Render(RenderArgs),
    /// Verify a plan against an instance.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "uniform")]
    pub kind: DatasetKind,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Workspace side; defaults to sqrt(n)/2.
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long, env = "KCONN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "auto")]
    pub method: ConnectivityMethod,
}

#[derive(Debug, Args)]
pub struct RestoreArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "eascr")]
    pub algo: Algorithm,
    /// Plan output path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the augmentation set (eascr only).
    #[arg(long)]
    pub dump_augmentation: Option<PathBuf>,
    /// Write the plan even if verification fails.
    #[arg(long)]
    pub allow_invalid: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<String>>,
    /// Comma-separated team sizes.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "KCONN_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub kind: Option<DatasetKind>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub side: Option<f64>,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    pub format: ExportFormat,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Augmentation set whose links the plan must establish.
    #[arg(long)]
    pub augmentation: Option<PathBuf>,
}

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) | Error::UnsupportedMethod { .. } | Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `argv` and runs the command, returning the exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Gen(a) => gen(a),
        Command::Check(a) => check(a),
        Command::Restore(a) => restore_cmd(a),
        Command::Bench(a) => bench(a),
        Command::ExportQcp(a) => export(a),
        Command::Render(a) => render(a),
        Command::Verify(a) => verify(a),
    }
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    Instance::load(path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Domain(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let res = out.write_all(text.as_bytes()).and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") });
            match res {
                // A closed pipe (e.g. `| head`) is not a failure of the command.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Domain(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn gen(a: GenArgs) -> CliResult {
    let cfg = GeneratorConfig { kind: a.kind, n: a.n, h: a.h, side: a.side.unwrap_or_else(|| default_side(a.n)), gmm: None, seed: a.seed };
    let inst = generate_instance(&cfg)?;
    emit(a.out.as_deref(), &inst.to_json())
}

fn check(a: CheckArgs) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let ok = is_k_connected(&build_comm_graph(&inst), a.k, a.method)?;
    emit(None, &format!("k-connected: {ok}"))?;
    Ok(())
}

fn restore_cmd(a: RestoreArgs) -> CliResult {
    if !a.algo.supports(a.k) {
        return Err(CliError::Usage(format!("{} does not support k = {}", a.algo, a.k)));
    }
    if a.dump_augmentation.is_some() && a.algo != Algorithm::EaScr {
        return Err(CliError::Usage("--dump-augmentation requires --algo eascr".into()));
    }
    let inst = load_instance(&a.instance)?;
    let restoration = restore(&inst, a.k, a.algo)?;
    let report = restoration.verify(&inst)?;
    if !report.passed() {
        if !a.allow_invalid {
            return Err(CliError::Domain(format!("plan failed verification, not written: {}", report.summary())));
        }
        log::warn!("writing plan that failed verification: {}", report.summary());
    }
    if let (Some(path), Some(aug)) = (&a.dump_augmentation, &restoration.augmentation) {
        emit(Some(path), &aug.to_json())?;
    }
    eprintln!("{}: minmax {} total {}", a.algo, restoration.plan.minmax, restoration.plan.total);
    emit(a.out.as_deref(), &restoration.plan.to_json())
}

fn bench(a: BenchArgs) -> CliResult {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)?,
        None => ExperimentConfig { jobs: std::thread::available_parallelism().map_or(1, |n| n.get()), ..Default::default() },
    };
    if let Some(v) = a.algos {
        cfg.algos = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.kind {
        cfg.kind = v;
    }
    if let Some(v) = a.h {
        cfg.h = v;
    }
    if a.side.is_some() {
        cfg.side = a.side;
    }
    if let Some(v) = a.jobs {
        cfg.jobs = v;
    }
    cfg.validate()?;
    let result = run_experiment(&cfg)?;
    let files = result.write_to(&a.out)?;
    for agg in &result.aggregates {
        eprintln!(
            "{:>5} n={:<4} k={} feasible {}/{} minmax {:.4} total {:.4}",
            agg.algo.name(),
            agg.n,
            agg.k,
            agg.feasible,
            agg.trials,
            agg.minmax_mean,
            agg.total_mean
        );
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn export(a: ExportArgs) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let model = build_qcp(&inst, a.k)?;
    emit(a.out.as_deref(), &export_qcp(&model, a.format))
}

fn render(a: RenderArgs) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let plan = match &a.plan {
        Some(p) => Some(RestorationPlan::from_json(&inst, &read(p)?)?),
        None => None,
    };
    let graph = match &plan {
        Some(p) => build_comm_graph(&p.final_instance()?),
        None => build_comm_graph(&inst),
    };
    let svg = render_svg(&inst, &graph, plan.as_ref())?;
    emit(Some(&a.out), &svg)
}

fn verify(a: VerifyArgs) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let plan = RestorationPlan::from_json(&inst, &read(&a.plan)?)?;
    let aug = match &a.augmentation {
        Some(p) => Some(AugmentationSet::from_json(&read(p)?, a.k)?),
        None => None,
    };
    let report = verify_plan(&inst, &plan, aug.as_ref(), a.k)?;
    emit(None, &format!("{}\nvalid: {}", report.summary(), report.passed()))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Domain("plan failed verification".into()))
    }
}

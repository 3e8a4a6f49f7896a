//! Command-line front end. Every command returns its process exit code.

use std::env;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use psst_core::exploration::{psst_run_parallel, unrestricted_run, ExplorationReport};
use psst_core::problems::{finite_diff_gradient, relative_error, scalarization_sweep, two_task_grid, BundledProblem};
use psst_core::rng::rng_from_seed;
use psst_core::{ObjectiveVector, Problem, SolverConfig};
use rand::{Rng, RngCore};

use crate::output::*;
use crate::report::{render, summarize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;
pub const EXIT_GRADCHECK: i32 = 3;

/// Environment variable capping region parallelism.
pub const THREADS_ENV: &str = "PSST_THREADS";

#[derive(Debug, Parser)]
#[command(name = "psst", version, about = "Preference-region Pareto exploration experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Balance point, preference regions and per-region front exploration.
    Run(RunArgs),
    /// Weighted-sum baseline over a uniform two-task weight grid.
    Sweep(SweepArgs),
    /// Compare analytic gradients with central differences.
    Gradcheck(GradcheckArgs),
    /// Residual to the analytic front and iteration totals of written runs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_parser = BundledProblem::NAMES)]
    pub problem: String,
    /// Parameter dimension; hidden width for `mlp`.
    #[arg(long)]
    pub dim: Option<usize>,
}

impl ProblemArgs {
    pub fn size(&self) -> usize {
        self.dim.unwrap_or(if self.problem == "mlp" { 16 } else { 10 })
    }

    fn build(&self) -> Result<BundledProblem> {
        Ok(BundledProblem::by_name(&self.problem, self.size())?)
    }

    fn info(&self, problem: &BundledProblem) -> ProblemInfo {
        ProblemInfo {
            name: self.problem.clone(),
            size: self.size(),
            dim: problem.dim(),
            num_tasks: problem.num_tasks(),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of preference subregions.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Points kept per region.
    #[arg(long, default_value_t = 20)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Explore the whole front from the balance point, keeping k·budget points.
    #[arg(long)]
    pub no_region: bool,
    /// Seed every region from the balance point instead of a random start.
    #[arg(long)]
    pub warm_start: bool,
    #[command(flatten)]
    pub stopping: StoppingArgs,
}

/// Overrides of the descent stopping rule.
#[derive(Debug, Args)]
pub struct StoppingArgs {
    #[arg(long)]
    pub stationarity_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl StoppingArgs {
    fn apply(&self, config: SolverConfig) -> SolverConfig {
        SolverConfig {
            stationarity_tol: self.stationarity_tol.unwrap_or(config.stationarity_tol),
            max_iters: self.max_iters.unwrap_or(config.max_iters),
            ..config
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 11)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub stopping: StoppingArgs,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturb the analytic gradient to exercise the failure path.
    #[arg(long, hide = true)]
    pub corrupt_gradient: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the selected command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn usage_error(e: anyhow::Error) -> i32 {
    eprintln!("error: {e:#}");
    EXIT_USAGE
}

fn threads() -> Result<usize> {
    match env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(anyhow!("{THREADS_ENV} must be an integer ≥ 1, got {v:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Creates `dir` and checks that files can be written into it.
fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".psst-write-test");
    fs::write(&probe, b"").with_context(|| format!("{} is not writable", dir.display()))?;
    fs::remove_file(&probe).ok();
    Ok(())
}

fn run_id(parts: &[String]) -> String {
    parts.join("-")
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    let setup = || -> Result<(BundledProblem, SolverConfig, usize)> {
        let problem = args.problem.build()?;
        let config = args.stopping.apply(SolverConfig {
            k: args.k,
            region_budget: args.budget,
            master_seed: args.seed,
            warm_start: args.warm_start,
            ..SolverConfig::default()
        });
        config.validate()?;
        let threads = threads()?;
        prepare_out(&args.out)?;
        Ok((problem, config, threads))
    };
    let (problem, config, threads) = match setup() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };

    let started = Instant::now();
    let outcome = if args.no_region {
        unrestricted_run(&problem, &config, config.k * config.region_budget)
    } else {
        psst_run_parallel(&problem, &config, threads)
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: no Pareto point found: {e}");
            return EXIT_NO_SOLUTION;
        }
    };

    let mut id = vec![args.problem.problem.clone(), format!("n{}", args.problem.size())];
    id.extend([format!("k{}", args.k), format!("b{}", args.budget), format!("s{}", args.seed)]);
    if args.no_region {
        id.push("noregion".into());
    }
    if args.warm_start {
        id.push("warm".into());
    }
    let id = run_id(&id);
    let manifest = run_manifest(&id, args, &problem, &config, &report);
    let records: Vec<FrontRecord> = report
        .sets
        .iter()
        .flat_map(|set| {
            let id = &id;
            set.points
                .iter()
                .enumerate()
                .map(move |(j, p)| FrontRecord::from_point(id, set.region_index as i64, j, p))
        })
        .collect();
    let written = write_front(&args.out.join(FRONT_FILE), problem.num_tasks(), &records)
        .and_then(|_| write_json(&args.out.join(MANIFEST_FILE), &manifest))
        .and_then(|_| write_json(&args.out.join(BEST_FILE), &report.best));
    if let Err(e) = written {
        return usage_error(e);
    }
    println!(
        "{id}: {} points, best main loss {:.6e}, {} descent iterations, {} tangent solves, {:.3}s",
        report.point_count(),
        report.best.losses.main(),
        report.total_descent_iters,
        report.total_tangent_solves,
        started.elapsed().as_secs_f64()
    );
    for s in report.summaries.iter().filter(|s| s.error.is_some()) {
        eprintln!("warning: region {} failed: {}", s.region_index, s.error.as_deref().unwrap_or_default());
    }
    EXIT_OK
}

fn run_manifest(
    id: &str,
    args: &RunArgs,
    problem: &BundledProblem,
    config: &SolverConfig,
    report: &ExplorationReport,
) -> RunManifest {
    let regions = report
        .summaries
        .iter()
        .map(|s| RegionCounters {
            region_index: s.region_index as i64,
            bounds: report
                .regions
                .iter()
                .find(|r| r.index == s.region_index)
                .map(|r| [r.lo.angle, r.hi.angle]),
            descent_iters: s.work.descent_iters,
            tangent_solves: s.work.tangent_solves,
            points: s.points,
            error: s.error.clone(),
        })
        .collect();
    let balance = &report.balance;
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: "run".into(),
        run_id: id.into(),
        problem: args.problem.info(problem),
        master_seed: config.master_seed,
        config: config.clone(),
        no_region: args.no_region,
        balance: Some(BalanceSummary {
            pi0: balance.pi0,
            losses: balance.point.losses.to_vec(),
            iters_used: balance.point.iters_used,
        }),
        regions,
        sweep: Vec::new(),
        total_iters: report.total_descent_iters,
        total_tangent_solves: report.total_tangent_solves,
        point_count: report.point_count(),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    let setup = || -> Result<(BundledProblem, SolverConfig)> {
        let problem = args.problem.build()?;
        if problem.num_tasks() != 2 {
            return Err(anyhow!("sweep supports two-task problems only"));
        }
        if args.grid == 0 {
            return Err(anyhow!("--grid must be at least 1"));
        }
        let config = args.stopping.apply(SolverConfig { master_seed: args.seed, ..SolverConfig::default() });
        config.validate()?;
        prepare_out(&args.out)?;
        Ok((problem, config))
    };
    let (problem, config) = match setup() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };

    let started = Instant::now();
    let entries = match scalarization_sweep(&problem, &two_task_grid(args.grid), &config) {
        Ok(e) => e,
        Err(e) => return usage_error(e.into()),
    };
    let id = run_id(&[
        "sweep".into(),
        args.problem.problem.clone(),
        format!("n{}", args.problem.size()),
        format!("g{}", args.grid),
        format!("s{}", args.seed),
    ]);
    let records: Vec<FrontRecord> = entries
        .iter()
        .enumerate()
        .filter_map(|(j, e)| e.point.as_ref().map(|p| FrontRecord::from_point(&id, SWEEP_REGION, j, p)))
        .collect();
    if records.is_empty() {
        eprintln!("error: no weight converged");
        return EXIT_NO_SOLUTION;
    }
    let total_iters = entries.iter().map(|e| e.iters).sum();
    let best = entries
        .iter()
        .filter_map(|e| e.point.as_ref())
        .fold(None, |acc: Option<&psst_core::ParetoPoint>, p| match acc {
            Some(b) if b.losses.main() <= p.losses.main() => Some(b),
            _ => Some(p),
        })
        .cloned();
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: "sweep".into(),
        run_id: id.clone(),
        problem: args.problem.info(&problem),
        master_seed: args.seed,
        config,
        no_region: false,
        balance: None,
        regions: Vec::new(),
        sweep: entries
            .iter()
            .map(|e| SweepCounters {
                weights: e.weights.clone(),
                iters: e.iters,
                converged: e.point.is_some(),
                error: e.error.clone(),
            })
            .collect(),
        total_iters,
        total_tangent_solves: 0,
        point_count: records.len(),
    };
    let written = write_front(&args.out.join(FRONT_FILE), problem.num_tasks(), &records)
        .and_then(|_| write_json(&args.out.join(MANIFEST_FILE), &manifest))
        .and_then(|_| write_json(&args.out.join(BEST_FILE), &best));
    if let Err(e) = written {
        return usage_error(e);
    }
    println!(
        "{id}: {} of {} weights converged, {total_iters} descent iterations, {:.3}s",
        records.len(),
        entries.len(),
        started.elapsed().as_secs_f64()
    );
    EXIT_OK
}

/// Adds a fixed offset to every analytic gradient.
struct Corrupted<'a>(&'a dyn Problem);

impl Problem for Corrupted<'_> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn num_tasks(&self) -> usize {
        self.0.num_tasks()
    }
    fn evaluate(&self, theta: &[f64]) -> psst_core::Result<ObjectiveVector> {
        self.0.evaluate(theta)
    }
    fn gradient(&self, theta: &[f64], task: usize) -> psst_core::Result<Vec<f64>> {
        let mut g = self.0.gradient(theta, task)?;
        g[0] += 1e-2;
        Ok(g)
    }
    fn sample_initial(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.0.sample_initial(rng)
    }
}

/// Relative-error threshold of the gradient check.
pub fn gradcheck_threshold(problem: &str) -> f64 {
    if problem == "quadratic" {
        1e-8
    } else {
        1e-5
    }
}

/// Largest relative error between analytic and central-difference gradients
/// over `trials` points drawn uniformly from `[−1, 1]^n`.
pub fn max_gradient_error(problem: &dyn Problem, trials: usize, seed: u64) -> psst_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let theta: Vec<f64> = (0..problem.dim()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        for m in 0..problem.num_tasks() {
            let exact = problem.gradient(&theta, m)?;
            let fd = finite_diff_gradient(problem, &theta, m, 1e-6)?;
            worst = worst.max(relative_error(&exact, &fd, 1e-8));
        }
    }
    Ok(worst)
}

pub fn cmd_gradcheck(args: &GradcheckArgs) -> i32 {
    let problem = match args.problem.build() {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    if args.trials == 0 {
        return usage_error(anyhow!("--trials must be at least 1"));
    }
    let corrupted = Corrupted(&problem);
    let target: &dyn Problem = if args.corrupt_gradient { &corrupted } else { &problem };
    let worst = match max_gradient_error(target, args.trials, args.seed) {
        Ok(w) => w,
        Err(e) => return usage_error(e.into()),
    };
    let threshold = gradcheck_threshold(&args.problem.problem);
    let pass = worst <= threshold;
    println!(
        "{}: max relative error {worst:.3e} over {} points (threshold {threshold:.0e}) {}",
        args.problem.problem,
        args.trials,
        if pass { "ok" } else { "FAILED" }
    );
    if pass {
        EXIT_OK
    } else {
        EXIT_GRADCHECK
    }
}

pub fn cmd_report(args: &ReportArgs) -> i32 {
    let load = |dir: &Path| -> Result<crate::report::RunSummary> {
        summarize(dir)?.ok_or_else(|| anyhow!("{}: problem has no analytic front", dir.display()))
    };
    let run = match load(&args.run) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let baseline = match args.baseline.as_deref().map(load).transpose() {
        Ok(b) => b,
        Err(e) => return usage_error(e),
    };
    print!("{}", render(&run, baseline.as_ref()));
    EXIT_OK
}

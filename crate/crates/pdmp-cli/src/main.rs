//! `pdmp` — simulate piecewise-deterministic jump chains and estimate their
//! transition density from one long trajectory.
//!
//! Subcommands: `simulate`, `estimate`, `replicate`, `sweep`, `clt`, `pi`.
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

mod config;
mod output;

use clap::{Parser, Subcommand};
use config::RunConfig;
use pdmp::harness::{self, ExperimentConfig};
use pdmp::model::ModelRegistry;
use pdmp::quad::QuadSpec;
use pdmp::sim::simulate_stream;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "pdmp",
    version,
    about = "Piecewise-deterministic Markov process simulation and recursive \
             nonparametric estimation of the jump transition density"
)]
struct Cli {
    /// INI-style config file (sections: model, kernel, bandwidths, experiment)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one config key, e.g. --set bandwidths.alpha=0.5
    /// (equivalently: --bandwidths.alpha 0.5)
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,

    /// Master seed; omitted seeds are drawn from entropy and echoed in the
    /// manifest
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(
        short,
        long,
        global = true,
        default_value = "pdmp-out",
        value_name = "DIR"
    )]
    out: PathBuf,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one trajectory and write it as CSV
    Simulate {
        /// Number of jumps
        #[arg(long)]
        n: Option<usize>,
        /// Also write a plot-ready continuous path with this many samples
        /// per inter-jump segment
        #[arg(long, value_name = "K")]
        path_points: Option<usize>,
    },
    /// Estimate the transition density at the configured targets from one
    /// trajectory
    Estimate {
        /// Target abscissa x (replaces the configured target list)
        #[arg(long, requires = "y")]
        x: Option<f64>,
        /// Target ordinate y
        #[arg(long, requires = "x")]
        y: Option<f64>,
        /// Number of observed jumps to estimate from
        #[arg(long)]
        n: Option<usize>,
        /// Also write the full estimated curve q̂(x, ·)
        #[arg(long)]
        curve: bool,
    },
    /// Replicated estimation study over the configured targets and sample
    /// sizes
    Replicate,
    /// Bandwidth-exponent sweep at a fixed sample size
    Sweep {
        /// Comma-separated alpha grid
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Comma-separated beta grid
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        /// Sample size of the sweep
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Central-limit study of the estimator at one target
    Clt {
        #[arg(long, requires = "y")]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        y: Option<f64>,
    },
    /// Invariant-distribution study: kernel curve, histogram, boundary atom
    Pi {
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() {
    // `--section.key value` / `--section.key=value` mirror every config key
    // as a flag; rewrite them into --set before clap sees them.
    let mut args: Vec<String> = Vec::new();
    let mut overrides: Vec<String> = Vec::new();
    let mut raw = std::env::args().peekable();
    while let Some(arg) = raw.next() {
        if let Some(dotted) = arg.strip_prefix("--") {
            let looks_dotted = dotted.split('=').next().is_some_and(|head| {
                head.split_once('.')
                    .is_some_and(|(s, k)| !s.is_empty() && !k.is_empty())
            });
            if looks_dotted {
                if dotted.contains('=') {
                    overrides.push(dotted.to_string());
                } else if let Some(value) = raw.next() {
                    overrides.push(format!("{dotted}={value}"));
                } else {
                    eprintln!("error: flag --{dotted} needs a value");
                    std::process::exit(1);
                }
                continue;
            }
        }
        args.push(arg);
    }

    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };

    if let Ok(threads) = std::env::var("PDMP_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: PDMP_THREADS must be a positive integer, got {threads:?}");
                std::process::exit(1);
            }
        }
    }

    match run(cli, overrides) {
        Ok(()) => {}
        Err(e) => {
            match &e {
                CliError::Config(msg) => eprintln!("config error: {msg}"),
                CliError::Runtime(msg) => eprintln!("error: {msg}"),
            }
            std::process::exit(e.code());
        }
    }
}

fn load_config(cli: &Cli, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = match &cli.config {
        None => String::new(),
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
    };
    let mut entries = config::parse_document(&text).map_err(config_err)?;
    for item in &cli.set {
        let (key, value) = config::parse_override(item).map_err(config_err)?;
        entries.insert(key, value);
    }
    for item in overrides {
        let (key, value) = config::parse_override(item).map_err(config_err)?;
        entries.insert(key, value);
    }
    let mut cfg = config::build(&entries).map_err(config_err)?;
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

/// Resolve the seed: explicit value or entropy, echoed in the manifest.
fn resolve_seed(cfg: &mut RunConfig) -> u64 {
    let seed = cfg.seed.unwrap_or_else(|| {
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        nanos ^ (u64::from(std::process::id()) << 32)
    });
    cfg.seed = Some(seed);
    cfg.experiment.seed = seed;
    seed
}

/// Validate against the registries and surface advisory warnings.
fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let warnings = cfg.experiment.validate().map_err(config_err)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn write_manifest(cfg: &RunConfig, seed: u64, out: &Path) -> Result<(), CliError> {
    let manifest = config::render_manifest(cfg, seed);
    output::write_atomic(out, "manifest", manifest.as_bytes()).map_err(runtime_err)?;
    Ok(())
}

/// Uniform grid strictly inside the model's state space, for curve dumps.
fn interior_grid(cfg: &ExperimentConfig, points: usize) -> Result<Vec<f64>, CliError> {
    let model = ModelRegistry::builtin()
        .build(&cfg.model_name, &cfg.model_params)
        .map_err(config_err)?;
    let lo = model.space().lower()[0];
    let hi = model.space().upper()[0];
    let margin = (hi - lo) / 100.0;
    let (a, b) = (lo + margin, hi - margin);
    Ok((0..points)
        .map(|i| a + (b - a) * i as f64 / (points.max(2) - 1) as f64)
        .collect())
}

fn run(cli: Cli, overrides: Vec<String>) -> Result<(), CliError> {
    let mut cfg = load_config(&cli, &overrides)?;
    let out = cli.out.clone();

    match cli.cmd {
        Cmd::Simulate { n, path_points } => {
            if let Some(n) = n {
                if n == 0 {
                    return Err(CliError::Config("--n must be at least 1".into()));
                }
                cfg.jumps = n;
            }
            if let Some(k) = path_points {
                cfg.path_points = k;
            }
            validate(&cfg)?;
            let seed = resolve_seed(&mut cfg);
            let model = ModelRegistry::builtin()
                .build(&cfg.experiment.model_name, &cfg.experiment.model_params)
                .map_err(config_err)?;
            let traj = simulate_stream(&model, &[cfg.experiment.x0], cfg.jumps, seed, 0)
                .map_err(runtime_err)?;
            let mut csv = Vec::new();
            traj.write_csv(&mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "trajectory.csv", &csv).map_err(runtime_err)?;
            if cfg.path_points > 0 {
                let path_csv = sample_path(&model, &traj, cfg.experiment.x0, cfg.path_points);
                output::write_atomic(&out, "path.csv", path_csv.as_bytes()).map_err(runtime_err)?;
            }
            write_manifest(&cfg, seed, &out)?;
            println!(
                "wrote {} ({} jumps, seed {seed})",
                out.join("trajectory.csv").display(),
                traj.len()
            );
        }

        Cmd::Estimate { x, y, n, curve } => {
            if let (Some(x), Some(y)) = (x, y) {
                cfg.experiment.targets = vec![(x, y)];
            }
            if let Some(n) = n {
                cfg.experiment.n_list = vec![n];
            }
            if curve {
                cfg.emit_curve = true;
            }
            validate(&cfg)?;
            let seed = resolve_seed(&mut cfg);
            let rows = harness::single_run_estimates(&cfg.experiment).map_err(runtime_err)?;
            let mut csv = Vec::new();
            harness::write_estimates_csv(&rows, &mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "estimate.csv", &csv).map_err(runtime_err)?;
            print!("{}", String::from_utf8_lossy(&csv));
            if cfg.emit_curve {
                let grid = interior_grid(&cfg.experiment, cfg.curve_points)?;
                for x in distinct_xs(&cfg.experiment.targets) {
                    let table = harness::transition_curve(&cfg.experiment, x, &grid)
                        .map_err(runtime_err)?;
                    let mut curve_csv = Vec::new();
                    table.write_csv(&mut curve_csv).map_err(runtime_err)?;
                    output::write_atomic(&out, &format!("curve_{x}.csv"), &curve_csv)
                        .map_err(runtime_err)?;
                }
            }
            write_manifest(&cfg, seed, &out)?;
        }

        Cmd::Replicate => {
            validate(&cfg)?;
            let seed = resolve_seed(&mut cfg);
            let table = harness::run_replicates(&cfg.experiment).map_err(runtime_err)?;
            let mut csv = Vec::new();
            table.write_csv(&mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "replicates.csv", &csv).map_err(runtime_err)?;
            let grid = interior_grid(&cfg.experiment, cfg.curve_points)?;
            for x in distinct_xs(&cfg.experiment.targets) {
                let curve =
                    harness::transition_curve(&cfg.experiment, x, &grid).map_err(runtime_err)?;
                let mut curve_csv = Vec::new();
                curve.write_csv(&mut curve_csv).map_err(runtime_err)?;
                output::write_atomic(&out, &format!("curve_{x}.csv"), &curve_csv)
                    .map_err(runtime_err)?;
            }
            write_manifest(&cfg, seed, &out)?;
            println!(
                "wrote {} ({} rows, {} failed reads)",
                out.join("replicates.csv").display(),
                table.rows.len(),
                table.failures
            );
            for (id, reason) in &table.failed_replicates {
                eprintln!("warning: replicate {id} failed to simulate: {reason}");
            }
        }

        Cmd::Sweep { alphas, betas, n } => {
            if let Some(a) = alphas {
                cfg.alphas = a;
            }
            if let Some(b) = betas {
                cfg.betas = b;
            }
            cfg.experiment.n_list = vec![n];
            validate(&cfg)?;
            let seed = resolve_seed(&mut cfg);
            let table = harness::bandwidth_sweep(&cfg.experiment, &cfg.alphas, &cfg.betas)
                .map_err(runtime_err)?;
            let mut csv = Vec::new();
            table.write_csv(&mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "replicates.csv", &csv).map_err(runtime_err)?;
            write_manifest(&cfg, seed, &out)?;
            println!(
                "wrote {} ({} rows over {} alpha x {} beta values)",
                out.join("replicates.csv").display(),
                table.rows.len(),
                cfg.alphas.len(),
                cfg.betas.len()
            );
        }

        Cmd::Clt { x, y } => {
            if let (Some(x), Some(y)) = (x, y) {
                cfg.experiment.targets = vec![(x, y)];
            }
            validate(&cfg)?;
            for w in cfg.experiment.clt_warnings(1) {
                eprintln!("warning: {w}");
            }
            let seed = resolve_seed(&mut cfg);
            let target = cfg.experiment.targets[0];
            let study = harness::clt_study(&cfg.experiment, target, &QuadSpec::default())
                .map_err(runtime_err)?;
            let mut csv = Vec::new();
            study.write_csv(&mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "clt.csv", &csv).map_err(runtime_err)?;
            write_manifest(&cfg, seed, &out)?;
            println!(
                "clt at ({}, {}): n={}, replicates={}, failures={}",
                target.0, target.1, study.n, cfg.experiment.replicates, study.failures
            );
            println!(
                "  KS = {:.4} (1% critical {:.4}), sample mean {:.4}, sample variance {:.4}",
                study.ks_statistic,
                study.ks_critical_1pct,
                study.sample_mean,
                study.sample_variance
            );
            println!(
                "  with 1/v1^d scale factor: sample variance {:.4}, KS {:.4}",
                study.sample_variance_scale_adjusted, study.ks_scale_adjusted
            );
        }

        Cmd::Pi { points, lo, hi } => {
            if let Some(p) = points {
                cfg.pi_points = p;
            }
            if let Some(l) = lo {
                cfg.pi_lo = l;
            }
            if let Some(h) = hi {
                cfg.pi_hi = h;
            }
            if cfg.pi_points == 0 || cfg.pi_lo >= cfg.pi_hi {
                return Err(CliError::Config(
                    "pi grid needs points >= 1 and lo < hi".into(),
                ));
            }
            validate(&cfg)?;
            let seed = resolve_seed(&mut cfg);
            let grid: Vec<f64> = if cfg.pi_points == 1 {
                vec![0.5 * (cfg.pi_lo + cfg.pi_hi)]
            } else {
                (0..cfg.pi_points)
                    .map(|i| {
                        cfg.pi_lo + (cfg.pi_hi - cfg.pi_lo) * i as f64 / (cfg.pi_points - 1) as f64
                    })
                    .collect()
            };
            let study = harness::pi_study(&cfg.experiment, &grid).map_err(runtime_err)?;
            let mut csv = Vec::new();
            study.write_csv(&mut csv).map_err(runtime_err)?;
            output::write_atomic(&out, "pi.csv", &csv).map_err(runtime_err)?;
            write_manifest(&cfg, seed, &out)?;
            println!(
                "wrote {} (n={}, boundary atom frequency {:.4})",
                out.join("pi.csv").display(),
                study.n,
                study.boundary_freq
            );
        }
    }
    Ok(())
}

fn distinct_xs(targets: &[(f64, f64)]) -> Vec<f64> {
    let mut xs: Vec<f64> = Vec::new();
    for &(x, _) in targets {
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs
}

/// Plot-ready continuous path: `k` samples along the flow in every
/// inter-jump segment, rows `t,x`.
fn sample_path(
    model: &pdmp::model::PdmpModel,
    traj: &pdmp::trajectory::Trajectory,
    x0: f64,
    k: usize,
) -> String {
    let k = k.max(2);
    let mut out = String::from("t,x\n");
    let flow = model.flow();
    let mut start = vec![x0];
    let mut t0 = 0.0;
    for rec in traj.iter() {
        for i in 0..k {
            let dt = rec.gap * i as f64 / (k - 1) as f64;
            let x = flow.at(&start, dt)[0];
            let _ = writeln!(out, "{},{}", t0 + dt, x);
        }
        t0 = rec.time;
        start[0] = rec.post[0];
    }
    out
}

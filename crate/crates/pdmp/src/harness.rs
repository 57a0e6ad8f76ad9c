//! Replicated experiments over one-dimensional models.
//!
//! Every operation here is deterministic given the configuration: replicate
//! `r` draws from RNG stream `(seed, r)`, replicates run in parallel, and
//! results are placed by replicate id, so thread scheduling cannot reorder
//! or perturb anything. Estimates at several sample sizes come from a single
//! pass over each trajectory (the estimator is streaming, so intermediate
//! reads are snapshots, not re-runs).

use crate::bandwidth::{BandwidthError, BandwidthSchedule};
use crate::estimator::{EstimatorError, EstimatorState, EvalTarget};
use crate::kernel::{KernelError, KernelRegistry, ProductKernel};
use crate::model::{ModelError, ModelParams, ModelRegistry, PdmpModel};
use crate::quad::QuadSpec;
use crate::reference::{self, ReferenceError};
use crate::sim::{simulate_stream, SimError};
use crate::space::SpaceError;
use crate::stats;
use crate::trajectory::Trajectory;
use rayon::prelude::*;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Bandwidth(#[from] BandwidthError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error("invalid experiment config: {0}")]
    Config(String),
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Registered model name (`"cell"`).
    pub model_name: String,
    /// Model parameters as flat key/value pairs.
    pub model_params: ModelParams,
    /// Start point of every trajectory.
    pub x0: f64,
    /// Evaluation pairs `(x, y)`.
    pub targets: Vec<(f64, f64)>,
    /// Ascending jump counts at which estimates are read.
    pub n_list: Vec<usize>,
    /// Number of replicates.
    pub replicates: usize,
    /// Registered kernel name.
    pub kernel_name: String,
    pub v1: f64,
    pub alpha: f64,
    pub w1: f64,
    pub beta: f64,
    /// Master seed; replicate `r` uses stream `r`.
    pub seed: u64,
}

/// The simulation-study defaults: cell model, start size 1, targets
/// `(1, 0.5)` and `(2, 1)`, jump counts 5e3/1e4/2e4/5e4, Epanechnikov
/// kernel, `v₁ = w₁ = 0.1`, `α = 0.125`, `β = 0.1`.
impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model_name: "cell".into(),
            model_params: ModelParams::new(),
            x0: 1.0,
            targets: vec![(1.0, 0.5), (2.0, 1.0)],
            n_list: vec![5_000, 10_000, 20_000, 50_000],
            replicates: 100,
            kernel_name: "epanechnikov".into(),
            v1: 0.1,
            alpha: 0.125,
            w1: 0.1,
            beta: 0.1,
            seed: 0,
        }
    }
}

/// Everything an experiment run needs, resolved from the registries.
struct Resolved {
    model: PdmpModel,
    kernel: ProductKernel,
    v: BandwidthSchedule,
    w: BandwidthSchedule,
}

impl ExperimentConfig {
    fn resolve(&self) -> Result<Resolved, HarnessError> {
        if self.replicates == 0 {
            return Err(HarnessError::Config("replicates must be at least 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::Config("n_list must not be empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config(
                "n_list must be strictly ascending".into(),
            ));
        }
        if self.n_list[0] == 0 {
            return Err(HarnessError::Config("jump counts must be positive".into()));
        }
        let model = ModelRegistry::builtin().build(&self.model_name, &self.model_params)?;
        if model.space().dim() != 1 {
            return Err(HarnessError::Config(
                "the experiment harness drives one-dimensional models".into(),
            ));
        }
        let base = KernelRegistry::builtin().get(&self.kernel_name)?;
        let kernel = ProductKernel::new(base, 1)?;
        let v = BandwidthSchedule::new(self.v1, self.alpha)?;
        let w = BandwidthSchedule::new(self.w1, self.beta)?;
        Ok(Resolved {
            model,
            kernel,
            v,
            w,
        })
    }

    /// Validate without running; returns advisory warnings (consistency
    /// windows, support conditions). Violations are allowed — exploring bad
    /// bandwidth exponents is part of the study — but worth flagging.
    pub fn validate(&self) -> Result<Vec<String>, HarnessError> {
        let resolved = self.resolve()?;
        let mut warnings = self.consistency_warnings(1);
        let mut probe = EstimatorState::new(
            resolved.model.space().clone(),
            resolved.kernel.clone(),
            resolved.v,
            resolved.w,
        )?;
        for &(x, y) in &self.targets {
            probe.register(&EvalTarget::pair1(x, y))?;
        }
        warnings.extend(probe.warnings().iter().cloned());
        Ok(warnings)
    }

    /// Advisory check of the bandwidth exponents against the almost-sure
    /// consistency window in dimension `d`.
    pub fn consistency_warnings(&self, d: usize) -> Vec<String> {
        let d = d as f64;
        let mut out = Vec::new();
        if self.alpha * d >= 1.0 {
            out.push(format!(
                "alpha·d = {} is not below 1: consistency of the estimator is not guaranteed",
                self.alpha * d
            ));
        }
        if 8.0 * self.beta * d >= 1.0 {
            out.push(format!(
                "8·beta·d = {} is not below 1: consistency of the estimator is not guaranteed",
                8.0 * self.beta * d
            ));
        }
        out
    }

    /// Advisory check against the parameter windows of the normalized-error
    /// Gaussian limit in dimension `d`.
    pub fn clt_warnings(&self, d: usize) -> Vec<String> {
        let d = d as f64;
        let mut out = Vec::new();
        if !(self.alpha > 1.0 / (2.0 + d) && self.alpha < 1.0 / d) {
            out.push(format!(
                "alpha = {} is outside (1/(2+d), 1/d) = ({:.4}, {:.4}): \
                 the Gaussian limit of the estimator is not covered by the theory",
                self.alpha,
                1.0 / (2.0 + d),
                1.0 / d
            ));
        }
        let four_beta = 4.0 * self.beta;
        let beta_lo = 2.0 * (1.0 - self.alpha * d);
        let beta_hi = (1.0 / (2.0 * d)).min(self.alpha - 1.0 / (2.0 * d));
        if beta_hi <= beta_lo {
            out.push(format!(
                "no beta satisfies the Gaussian-limit rate condition at alpha = {} \
                 (needs 2(1-alpha·d) < 4·beta < min(1/(2d), alpha - 1/(2d)))",
                self.alpha
            ));
        } else if !(four_beta > beta_lo && four_beta < beta_hi) {
            out.push(format!(
                "4·beta = {four_beta} is outside ({beta_lo:.4}, {beta_hi:.4}): \
                 the pair-density rate needed by the Gaussian limit is not covered by the theory"
            ));
        }
        out
    }

    fn max_records(&self) -> usize {
        // Reading an estimate "at n" consumes n + 1 records.
        self.n_list.last().unwrap() + 1
    }
}

/// One evaluated target at one sample size in one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub replicate: u64,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    /// `None` when the read failed (zero denominator at x).
    pub q_hat: Option<f64>,
    pub p_hat: f64,
    pub h_hat: f64,
    /// Relative error against the model's own transition density.
    pub rel_err: Option<f64>,
    pub stream: u64,
}

/// Rows from a replicated run, ordered by `(replicate, n, alpha, beta,
/// target)`. Failed reads stay in the table as `NaN` entries; statistics are
/// computed over the successes. A replicate whose simulation fails outright
/// contributes no rows and is listed in `failed_replicates`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplicateTable {
    pub rows: Vec<ReplicateRow>,
    /// Count of recorded per-target read failures (zero denominators).
    pub failures: usize,
    /// Replicates that could not be simulated, with the reason.
    pub failed_replicates: Vec<(u64, String)>,
}

impl ReplicateTable {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "replicate,n,alpha,beta,x,y,q_hat,p_hat,h_hat,rel_err,stream"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.replicate,
                r.n,
                r.alpha,
                r.beta,
                r.x,
                r.y,
                r.q_hat.unwrap_or(f64::NAN),
                r.p_hat,
                r.h_hat,
                r.rel_err.unwrap_or(f64::NAN),
                r.stream
            )?;
        }
        Ok(())
    }

    /// Successful q-estimates for one `(n, target)` slice, in replicate order.
    pub fn q_estimates(&self, n: usize, target: (f64, f64)) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && (r.x, r.y) == target)
            .filter_map(|r| r.q_hat)
            .collect()
    }

    /// Successful relative errors for one `(n, target)` slice.
    pub fn relative_errors(&self, n: usize, target: (f64, f64)) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && (r.x, r.y) == target)
            .filter_map(|r| r.rel_err)
            .collect()
    }
}

/// Stream one replicate's records into an estimator, reading every target at
/// every requested sample size.
fn replicate_rows(
    cfg: &ExperimentConfig,
    resolved: &Resolved,
    traj: &Trajectory,
    alpha_beta: (f64, f64),
    v: BandwidthSchedule,
    w: BandwidthSchedule,
    replicate: u64,
) -> Result<(Vec<ReplicateRow>, usize), HarnessError> {
    let mut state = EstimatorState::new(
        resolved.model.space().clone(),
        resolved.kernel.clone(),
        v,
        w,
    )?;
    for &(x, y) in &cfg.targets {
        state.register(&EvalTarget::pair1(x, y))?;
    }
    let transitions = resolved.model.transitions();
    let mut rows = Vec::with_capacity(cfg.n_list.len() * cfg.targets.len());
    let mut failures = 0usize;
    let mut next_snapshot = 0usize;
    for rec in traj.iter() {
        state.update(&rec)?;
        while next_snapshot < cfg.n_list.len()
            && state.records_consumed() == cfg.n_list[next_snapshot] + 1
        {
            let n = cfg.n_list[next_snapshot];
            for &(x, y) in &cfg.targets {
                let oracle = transitions.density(&[x], &[y]);
                let q_hat = match state.q_hat1(x, y) {
                    Ok(v) => Some(v),
                    Err(EstimatorError::ZeroDenominator(_)) => {
                        failures += 1;
                        None
                    }
                    Err(e) => return Err(e.into()),
                };
                let rel_err = match q_hat {
                    Some(v) if oracle > 0.0 => Some((v - oracle).abs() / oracle),
                    _ => None,
                };
                rows.push(ReplicateRow {
                    replicate,
                    n,
                    alpha: alpha_beta.0,
                    beta: alpha_beta.1,
                    x,
                    y,
                    q_hat,
                    p_hat: state.p_hat1(x)?,
                    h_hat: state.h_hat1(x, y)?,
                    rel_err,
                    stream: traj.stream(),
                });
            }
            next_snapshot += 1;
        }
    }
    Ok((rows, failures))
}

/// Run `cfg.replicates` independent replicates of the point-estimation
/// study: one trajectory per replicate, all targets read at every sample
/// size in `cfg.n_list`.
pub fn run_replicates(cfg: &ExperimentConfig) -> Result<ReplicateTable, HarnessError> {
    let resolved = cfg.resolve()?;
    if cfg.targets.is_empty() {
        return Err(HarnessError::Config("no targets registered".into()));
    }
    let records = cfg.max_records();
    let per_replicate: Vec<Result<ReplicateOutcome, HarnessError>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let traj =
                match simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, r as u64) {
                    Ok(t) => t,
                    Err(e) => return Ok(ReplicateOutcome::SimFailed(r as u64, e.to_string())),
                };
            let (rows, failures) = replicate_rows(
                cfg,
                &resolved,
                &traj,
                (cfg.alpha, cfg.beta),
                resolved.v,
                resolved.w,
                r as u64,
            )?;
            Ok(ReplicateOutcome::Done(rows, failures))
        })
        .collect();
    collect_outcomes(per_replicate)
}

enum ReplicateOutcome {
    Done(Vec<ReplicateRow>, usize),
    SimFailed(u64, String),
}

fn collect_outcomes(
    outcomes: Vec<Result<ReplicateOutcome, HarnessError>>,
) -> Result<ReplicateTable, HarnessError> {
    let mut table = ReplicateTable::default();
    for outcome in outcomes {
        match outcome? {
            ReplicateOutcome::Done(rows, failures) => {
                table.rows.extend(rows);
                table.failures += failures;
            }
            ReplicateOutcome::SimFailed(id, reason) => {
                table.failed_replicates.push((id, reason));
            }
        }
    }
    Ok(table)
}

/// Cross-product sweep of bandwidth exponents at the last sample size of
/// `cfg.n_list`. Each replicate's trajectory is simulated once and
/// re-estimated under every `(alpha, beta)` combination.
pub fn bandwidth_sweep(
    cfg: &ExperimentConfig,
    alphas: &[f64],
    betas: &[f64],
) -> Result<ReplicateTable, HarnessError> {
    if alphas.is_empty() || betas.is_empty() {
        return Ok(ReplicateTable::default());
    }
    let resolved = cfg.resolve()?;
    if cfg.targets.is_empty() {
        return Err(HarnessError::Config("no targets registered".into()));
    }
    let n = *cfg.n_list.last().unwrap();
    let sweep_cfg = ExperimentConfig {
        n_list: vec![n],
        ..cfg.clone()
    };
    let records = sweep_cfg.max_records();

    let per_replicate: Vec<Result<ReplicateOutcome, HarnessError>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let traj =
                match simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, r as u64) {
                    Ok(t) => t,
                    Err(e) => return Ok(ReplicateOutcome::SimFailed(r as u64, e.to_string())),
                };
            let mut rows = Vec::new();
            let mut failures = 0;
            for &alpha in alphas {
                for &beta in betas {
                    let v = BandwidthSchedule::new(cfg.v1, alpha)?;
                    let w = BandwidthSchedule::new(cfg.w1, beta)?;
                    let (mut rs, fs) = replicate_rows(
                        &sweep_cfg,
                        &resolved,
                        &traj,
                        (alpha, beta),
                        v,
                        w,
                        r as u64,
                    )?;
                    rows.append(&mut rs);
                    failures += fs;
                }
            }
            Ok(ReplicateOutcome::Done(rows, failures))
        })
        .collect();
    collect_outcomes(per_replicate)
}

/// Central-limit study of the estimator at one target.
#[derive(Debug, Clone, PartialEq)]
pub struct CltStudy {
    pub target: (f64, f64),
    pub n: usize,
    pub q_oracle: f64,
    /// Invariant density at the target abscissa, estimated by the ergodic
    /// average of the one-step density over a dedicated trajectory.
    pub p_estimate: f64,
    /// Asymptotic variance used for standardization.
    pub variance: f64,
    /// One entry per replicate; `None` marks a zero-denominator failure.
    pub standardized: Vec<Option<f64>>,
    pub q_hats: Vec<Option<f64>>,
    pub failures: usize,
    pub ks_statistic: f64,
    pub ks_critical_1pct: f64,
    pub sample_variance: f64,
    pub sample_mean: f64,
    /// Diagnostic: the same asymptotic variance with the bandwidth-scale
    /// factor `1/v₁^d` restored. The closed form in `variance` is exact only
    /// for `v₁ = 1`; empirically the standardized errors concentrate around
    /// this adjusted constant, so it is reported alongside.
    pub variance_scale_adjusted: f64,
    /// Sample variance of the errors standardized by
    /// `variance_scale_adjusted`.
    pub sample_variance_scale_adjusted: f64,
    /// KS statistic of the scale-adjusted standardized errors vs N(0, 1).
    pub ks_scale_adjusted: f64,
    /// Advisory warnings about the bandwidth exponents (Gaussian-limit
    /// parameter windows).
    pub warnings: Vec<String>,
}

impl CltStudy {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "# x={} y={} n={}",
            self.target.0, self.target.1, self.n
        )?;
        writeln!(
            out,
            "# q_oracle={} p_estimate={} variance={}",
            self.q_oracle, self.p_estimate, self.variance
        )?;
        writeln!(
            out,
            "# ks={} ks_critical_1pct={} sample_mean={} sample_variance={} failures={}",
            self.ks_statistic,
            self.ks_critical_1pct,
            self.sample_mean,
            self.sample_variance,
            self.failures
        )?;
        writeln!(
            out,
            "# variance_scale_adjusted={} sample_variance_scale_adjusted={} ks_scale_adjusted={}",
            self.variance_scale_adjusted,
            self.sample_variance_scale_adjusted,
            self.ks_scale_adjusted
        )?;
        writeln!(out, "replicate,q_hat,standardized")?;
        for (i, (q, s)) in self.q_hats.iter().zip(&self.standardized).enumerate() {
            writeln!(
                out,
                "{},{},{}",
                i,
                q.unwrap_or(f64::NAN),
                s.unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }

    /// Successful standardized errors, replicate order.
    pub fn successes(&self) -> Vec<f64> {
        self.standardized.iter().filter_map(|s| *s).collect()
    }
}

/// Standardize the estimation error of every replicate by the asymptotic
/// law: `n^{(1-αd)/2} (q̂ₙ - q) / sqrt(q²τ²/(p(1+αd)))`. The invariant
/// density `p` comes from the ergodic-average oracle computed on an extra
/// trajectory (stream id = number of replicates).
pub fn clt_study(
    cfg: &ExperimentConfig,
    target: (f64, f64),
    quad: &QuadSpec,
) -> Result<CltStudy, HarnessError> {
    let resolved = cfg.resolve()?;
    let n = *cfg.n_list.last().unwrap();
    let records = n + 1;
    let (x, y) = target;

    let q_oracle = resolved.model.transitions().density(&[x], &[y]);
    let p_traj = simulate_stream(
        &resolved.model,
        &[cfg.x0],
        records,
        cfg.seed,
        cfg.replicates as u64,
    )?;
    let p_estimate = reference::p_ergodic(&resolved.model, &p_traj, &[x], quad)?.value;
    let variance =
        reference::clt_variance(q_oracle, p_estimate, resolved.kernel.tau2(), cfg.alpha, 1)?;
    let rate = (n as f64).powf((1.0 - cfg.alpha) / 2.0);
    let scale = variance.sqrt();

    let q_hats: Vec<Option<f64>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| -> Result<Option<f64>, HarnessError> {
            let traj = simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, r as u64)?;
            let mut state = EstimatorState::new(
                resolved.model.space().clone(),
                resolved.kernel.clone(),
                resolved.v,
                resolved.w,
            )?;
            state.register(&EvalTarget::pair1(x, y))?;
            for rec in traj.iter() {
                state.update(&rec)?;
            }
            match state.q_hat1(x, y) {
                Ok(v) => Ok(Some(v)),
                Err(EstimatorError::ZeroDenominator(_)) => Ok(None),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_, _>>()?;

    let standardized: Vec<Option<f64>> = q_hats
        .iter()
        .map(|q| q.map(|v| rate * (v - q_oracle) / scale))
        .collect();
    let failures = standardized.iter().filter(|s| s.is_none()).count();

    let mut successes: Vec<f64> = standardized.iter().filter_map(|s| *s).collect();
    stats::sort(&mut successes);
    let (ks, sample_mean, sample_var) = if successes.len() >= 2 {
        (
            stats::ks_statistic(&successes, crate::normal::cdf),
            stats::mean(&successes),
            stats::sample_variance(&successes),
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };

    let variance_scale_adjusted = variance / cfg.v1;
    let adjust = cfg.v1.sqrt();
    let mut adjusted: Vec<f64> = successes.iter().map(|s| s * adjust).collect();
    stats::sort(&mut adjusted);
    let (ks_adj, var_adj) = if adjusted.len() >= 2 {
        (
            stats::ks_statistic(&adjusted, crate::normal::cdf),
            stats::sample_variance(&adjusted),
        )
    } else {
        (f64::NAN, f64::NAN)
    };

    Ok(CltStudy {
        target,
        n,
        q_oracle,
        p_estimate,
        variance,
        standardized,
        q_hats,
        failures,
        ks_statistic: ks,
        ks_critical_1pct: stats::ks_critical(successes.len().max(1), 0.01),
        sample_variance: sample_var,
        sample_mean,
        variance_scale_adjusted,
        sample_variance_scale_adjusted: var_adj,
        ks_scale_adjusted: ks_adj,
        warnings: cfg.clt_warnings(1),
    })
}

/// Invariant-distribution study: kernel curve, empirical histogram of the
/// interior pre-jump locations, and the boundary-atom frequency, all from
/// one trajectory (stream 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PiStudy {
    pub n: usize,
    pub grid: Vec<f64>,
    pub p_hat: Vec<f64>,
    /// Histogram density of interior pre-jump locations over the same bins,
    /// normalized by all records so its mass matches the interior fraction.
    pub hist: Vec<f64>,
    /// Fraction of records whose pre-jump location lies on the boundary.
    pub boundary_freq: f64,
}

impl PiStudy {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "# n={} boundary_atom_freq={}",
            self.n, self.boundary_freq
        )?;
        writeln!(out, "x,p_hat,hist")?;
        for i in 0..self.grid.len() {
            writeln!(out, "{},{},{}", self.grid[i], self.p_hat[i], self.hist[i])?;
        }
        Ok(())
    }
}

/// Run the invariant-distribution study over `grid` (bin centers; uniform
/// spacing required for the histogram overlay).
pub fn pi_study(cfg: &ExperimentConfig, grid: &[f64]) -> Result<PiStudy, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config(
            "pi study needs a nonempty grid".into(),
        ));
    }
    let resolved = cfg.resolve()?;
    let records = cfg.max_records();
    let traj = simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, 0)?;

    let mut state = EstimatorState::new(
        resolved.model.space().clone(),
        resolved.kernel.clone(),
        resolved.v,
        resolved.w,
    )?;
    state.register(&EvalTarget::grid1(grid))?;
    for rec in traj.iter() {
        state.update(&rec)?;
    }

    // Histogram over bins centered on the grid points.
    let (bin_lo, width) = if grid.len() == 1 {
        let lo = resolved.model.space().lower()[0];
        let hi = resolved.model.space().upper()[0];
        (lo, hi - lo)
    } else {
        let width = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - width).abs() > 1e-9 * width {
                return Err(HarnessError::Config(
                    "pi study grid must be uniformly spaced".into(),
                ));
            }
        }
        (grid[0] - 0.5 * width, width)
    };
    let mut counts = vec![0usize; grid.len()];
    let mut boundary = 0usize;
    for rec in traj.iter() {
        if rec.forced {
            boundary += 1;
            continue;
        }
        let z = rec.pre[0];
        let bin = ((z - bin_lo) / width).floor();
        if bin >= 0.0 && (bin as usize) < counts.len() {
            counts[bin as usize] += 1;
        }
    }
    let m = traj.len() as f64;
    let hist = counts.iter().map(|&c| c as f64 / (m * width)).collect();
    let p_hat = grid
        .iter()
        .map(|&x| state.p_hat1(x))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(PiStudy {
        n: state.sample_size(),
        grid: grid.to_vec(),
        p_hat,
        hist,
        boundary_freq: boundary as f64 / m,
    })
}

/// Estimated transition-density curve `q̂ₙ(x, ·)` from one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub x: f64,
    pub n: usize,
    pub rows: Vec<(f64, f64)>,
}

impl CurveTable {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# x={} n={}", self.x, self.n)?;
        writeln!(out, "y,q_hat")?;
        for (y, q) in &self.rows {
            writeln!(out, "{y},{q}")?;
        }
        Ok(())
    }
}

/// Estimate the full curve `q̂ₙ(x, ·)` over `ys` from one trajectory
/// (stream 0) at the last sample size of `cfg.n_list`.
pub fn transition_curve(
    cfg: &ExperimentConfig,
    x: f64,
    ys: &[f64],
) -> Result<CurveTable, HarnessError> {
    let resolved = cfg.resolve()?;
    let records = cfg.max_records();
    let traj = simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, 0)?;
    let mut state = EstimatorState::new(
        resolved.model.space().clone(),
        resolved.kernel.clone(),
        resolved.v,
        resolved.w,
    )?;
    state.register(&EvalTarget::curve1(x, ys))?;
    for rec in traj.iter() {
        state.update(&rec)?;
    }
    let values = state.q_hat_curve1(x, ys)?;
    Ok(CurveTable {
        x,
        n: state.sample_size(),
        rows: ys.iter().copied().zip(values).collect(),
    })
}

/// Point estimates from a single trajectory (stream 0) at the last sample
/// size, one row per target: the `x,y,q_hat,p_hat,h_hat,n` dump format.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub x: f64,
    pub y: f64,
    pub q_hat: Option<f64>,
    pub p_hat: f64,
    pub h_hat: f64,
    pub n: usize,
}

pub fn write_estimates_csv<W: Write>(rows: &[EstimateRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "x,y,q_hat,p_hat,h_hat,n")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.x,
            r.y,
            r.q_hat.unwrap_or(f64::NAN),
            r.p_hat,
            r.h_hat,
            r.n
        )?;
    }
    Ok(())
}

pub fn single_run_estimates(cfg: &ExperimentConfig) -> Result<Vec<EstimateRow>, HarnessError> {
    let resolved = cfg.resolve()?;
    if cfg.targets.is_empty() {
        return Err(HarnessError::Config("no targets registered".into()));
    }
    let records = cfg.max_records();
    let traj = simulate_stream(&resolved.model, &[cfg.x0], records, cfg.seed, 0)?;
    let mut state = EstimatorState::new(
        resolved.model.space().clone(),
        resolved.kernel.clone(),
        resolved.v,
        resolved.w,
    )?;
    for &(x, y) in &cfg.targets {
        state.register(&EvalTarget::pair1(x, y))?;
    }
    for rec in traj.iter() {
        state.update(&rec)?;
    }
    cfg.targets
        .iter()
        .map(|&(x, y)| {
            let q_hat = match state.q_hat1(x, y) {
                Ok(v) => Some(v),
                Err(EstimatorError::ZeroDenominator(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(EstimateRow {
                x,
                y,
                q_hat,
                p_hat: state.p_hat1(x)?,
                h_hat: state.h_hat1(x, y)?,
                n: state.sample_size(),
            })
        })
        .collect()
}

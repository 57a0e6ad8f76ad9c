//! Flat INI-style configuration with a closed schema.
//!
//! Four sections — `[model]`, `[kernel]`, `[bandwidths]`, `[experiment]` —
//! hold every tunable as `key = value`. Unknown sections or keys are errors,
//! every key has a default (the simulation-study parameter set), and the
//! rendered manifest of a run is itself a valid config that reproduces the
//! run byte for byte.

use pdmp::harness::ExperimentConfig;
use pdmp::model::ModelParams;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: key {key:?} appears before any [section] header")]
    KeyOutsideSection { line: usize, key: String },
    #[error("unknown section {0:?} (expected model, kernel, bandwidths, experiment)")]
    UnknownSection(String),
    #[error("unknown key {section}.{key}")]
    UnknownKey { section: String, key: String },
    #[error("{section}.{key}: cannot parse {value:?} as {ty}")]
    TypeMismatch {
        section: String,
        key: String,
        value: String,
        ty: &'static str,
    },
    #[error("{section}.{key} = {value}: {constraint}")]
    Constraint {
        section: String,
        key: String,
        value: String,
        constraint: String,
    },
    #[error("override {0:?} must look like section.key=value")]
    BadOverride(String),
}

const SECTIONS: [&str; 4] = ["model", "kernel", "bandwidths", "experiment"];

const KEYS: [(&str, &str); 22] = [
    ("model", "model"),
    ("model", "tau_flow"),
    ("model", "sigma"),
    ("model", "x0"),
    ("kernel", "kernel"),
    ("bandwidths", "v1"),
    ("bandwidths", "alpha"),
    ("bandwidths", "w1"),
    ("bandwidths", "beta"),
    ("experiment", "replicates"),
    ("experiment", "n_list"),
    ("experiment", "targets"),
    ("experiment", "seed"),
    ("experiment", "jumps"),
    ("experiment", "alphas"),
    ("experiment", "betas"),
    ("experiment", "pi_points"),
    ("experiment", "pi_lo"),
    ("experiment", "pi_hi"),
    ("experiment", "curve_points"),
    ("experiment", "emit_curve"),
    ("experiment", "path_points"),
];

/// Fully resolved run configuration: the experiment parameters plus the
/// CLI-level knobs that must survive into the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    /// None until resolved; the manifest always carries a concrete seed.
    pub seed: Option<u64>,
    /// Jump count for the `simulate` subcommand.
    pub jumps: usize,
    /// Exponent grids for the `sweep` subcommand.
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Grid of the `pi` subcommand.
    pub pi_points: usize,
    pub pi_lo: f64,
    pub pi_hi: f64,
    /// Points per transition curve; curves are emitted by `replicate` and,
    /// when `emit_curve` is set, by `estimate`.
    pub curve_points: usize,
    pub emit_curve: bool,
    /// Samples per inter-jump segment in the plotting path written by
    /// `simulate` (0 disables the path file).
    pub path_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut experiment = ExperimentConfig::default();
        experiment.model_params.insert("tau_flow".into(), 0.9);
        experiment.model_params.insert("sigma".into(), 0.1);
        Self {
            experiment,
            seed: None,
            jumps: 1000,
            alphas: vec![0.125, 0.25, 0.5],
            betas: vec![0.1],
            pi_points: 256,
            pi_lo: 0.1,
            pi_hi: 2.9,
            curve_points: 512,
            emit_curve: false,
            path_points: 0,
        }
    }
}

type Entries = BTreeMap<(String, String), String>;

/// Parse an INI document into `(section, key) -> value` entries, validating
/// section and key names against the schema.
pub fn parse_document(text: &str) -> Result<Entries, ConfigError> {
    let mut entries = Entries::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection(name));
            }
            section = Some(name);
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: trimmed.to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().trim_matches('"').to_string();
        let Some(section) = section.clone() else {
            return Err(ConfigError::KeyOutsideSection { line, key });
        };
        if !KEYS.contains(&(section.as_str(), key.as_str())) {
            return Err(ConfigError::UnknownKey { section, key });
        }
        entries.insert((section, key), value);
    }
    Ok(entries)
}

/// Parse one `section.key=value` override.
pub fn parse_override(text: &str) -> Result<((String, String), String), ConfigError> {
    let (path, value) = text
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(text.to_string()))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| ConfigError::BadOverride(text.to_string()))?;
    let section = section.trim().to_string();
    let key = key.trim().to_string();
    if !KEYS.contains(&(section.as_str(), key.as_str())) {
        if !SECTIONS.contains(&section.as_str()) {
            return Err(ConfigError::UnknownSection(section));
        }
        return Err(ConfigError::UnknownKey { section, key });
    }
    Ok(((section, key), value.trim().to_string()))
}

fn mismatch(section: &str, key: &str, value: &str, ty: &'static str) -> ConfigError {
    ConfigError::TypeMismatch {
        section: section.into(),
        key: key.into(),
        value: value.into(),
        ty,
    }
}

fn constraint(section: &str, key: &str, value: &str, what: &str) -> ConfigError {
    ConfigError::Constraint {
        section: section.into(),
        key: key.into(),
        value: value.into(),
        constraint: what.into(),
    }
}

fn get_f64(e: &Entries, s: &str, k: &str, default: f64) -> Result<f64, ConfigError> {
    match e.get(&(s.to_string(), k.to_string())) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| mismatch(s, k, v, "a real number")),
    }
}

fn get_usize(e: &Entries, s: &str, k: &str, default: usize) -> Result<usize, ConfigError> {
    match e.get(&(s.to_string(), k.to_string())) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| mismatch(s, k, v, "a nonnegative integer")),
    }
}

fn get_bool(e: &Entries, s: &str, k: &str, default: bool) -> Result<bool, ConfigError> {
    match e.get(&(s.to_string(), k.to_string())).map(String::as_str) {
        None => Ok(default),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(v) => Err(mismatch(s, k, v, "true or false")),
    }
}

fn get_list_f64(e: &Entries, s: &str, k: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
    match e.get(&(s.to_string(), k.to_string())) {
        None => Ok(default.to_vec()),
        Some(v) if v.is_empty() => Ok(Vec::new()),
        Some(v) => v
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| mismatch(s, k, v, "a comma list of reals"))
            })
            .collect(),
    }
}

/// Build a typed config from parsed entries, filling defaults and checking
/// value-level constraints.
pub fn build(entries: &Entries) -> Result<RunConfig, ConfigError> {
    let defaults = RunConfig::default();
    let exp_defaults = &defaults.experiment;

    let model_name = entries
        .get(&("model".into(), "model".into()))
        .cloned()
        .unwrap_or_else(|| exp_defaults.model_name.clone());
    let mut model_params = ModelParams::new();
    model_params.insert(
        "tau_flow".into(),
        get_f64(entries, "model", "tau_flow", 0.9)?,
    );
    model_params.insert("sigma".into(), get_f64(entries, "model", "sigma", 0.1)?);
    let x0 = get_f64(entries, "model", "x0", exp_defaults.x0)?;

    let kernel_name = entries
        .get(&("kernel".into(), "kernel".into()))
        .cloned()
        .unwrap_or_else(|| exp_defaults.kernel_name.clone());

    let replicates = get_usize(entries, "experiment", "replicates", exp_defaults.replicates)?;
    if replicates == 0 {
        return Err(constraint(
            "experiment",
            "replicates",
            "0",
            "must be at least 1",
        ));
    }

    let n_list = match entries.get(&("experiment".into(), "n_list".into())) {
        None => exp_defaults.n_list.clone(),
        Some(v) => v
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| mismatch("experiment", "n_list", v, "a comma list of integers"))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    if n_list.is_empty() || n_list[0] == 0 {
        return Err(constraint(
            "experiment",
            "n_list",
            &format!("{n_list:?}"),
            "needs at least one positive jump count",
        ));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(constraint(
            "experiment",
            "n_list",
            &format!("{n_list:?}"),
            "must be strictly ascending",
        ));
    }

    let targets = match entries.get(&("experiment".into(), "targets".into())) {
        None => exp_defaults.targets.clone(),
        Some(v) => v
            .split(',')
            .map(|pair| {
                let (x, y) = pair
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| mismatch("experiment", "targets", v, "x:y pairs"))?;
                Ok((
                    x.trim()
                        .parse()
                        .map_err(|_| mismatch("experiment", "targets", v, "x:y pairs"))?,
                    y.trim()
                        .parse()
                        .map_err(|_| mismatch("experiment", "targets", v, "x:y pairs"))?,
                ))
            })
            .collect::<Result<Vec<(f64, f64)>, ConfigError>>()?,
    };
    if targets.is_empty() {
        return Err(constraint(
            "experiment",
            "targets",
            "",
            "needs at least one x:y pair",
        ));
    }

    let seed = match entries.get(&("experiment".into(), "seed".into())) {
        None => None,
        Some(v) => Some(
            v.parse::<u64>()
                .map_err(|_| mismatch("experiment", "seed", v, "a 64-bit unsigned integer"))?,
        ),
    };

    let experiment = ExperimentConfig {
        model_name,
        model_params,
        x0,
        targets,
        n_list,
        replicates,
        kernel_name,
        v1: get_f64(entries, "bandwidths", "v1", exp_defaults.v1)?,
        alpha: get_f64(entries, "bandwidths", "alpha", exp_defaults.alpha)?,
        w1: get_f64(entries, "bandwidths", "w1", exp_defaults.w1)?,
        beta: get_f64(entries, "bandwidths", "beta", exp_defaults.beta)?,
        seed: seed.unwrap_or(0),
    };

    let jumps = get_usize(entries, "experiment", "jumps", defaults.jumps)?;
    if jumps == 0 {
        return Err(constraint("experiment", "jumps", "0", "must be at least 1"));
    }
    let pi_points = get_usize(entries, "experiment", "pi_points", defaults.pi_points)?;
    if pi_points == 0 {
        return Err(constraint(
            "experiment",
            "pi_points",
            "0",
            "must be at least 1",
        ));
    }
    let pi_lo = get_f64(entries, "experiment", "pi_lo", defaults.pi_lo)?;
    let pi_hi = get_f64(entries, "experiment", "pi_hi", defaults.pi_hi)?;
    if pi_lo >= pi_hi {
        return Err(constraint(
            "experiment",
            "pi_lo",
            &format!("{pi_lo}..{pi_hi}"),
            "pi_lo must be below pi_hi",
        ));
    }

    Ok(RunConfig {
        experiment,
        seed,
        jumps,
        alphas: get_list_f64(entries, "experiment", "alphas", &defaults.alphas)?,
        betas: get_list_f64(entries, "experiment", "betas", &defaults.betas)?,
        pi_points,
        pi_lo,
        pi_hi,
        curve_points: get_usize(entries, "experiment", "curve_points", defaults.curve_points)?,
        emit_curve: get_bool(entries, "experiment", "emit_curve", defaults.emit_curve)?,
        path_points: get_usize(entries, "experiment", "path_points", defaults.path_points)?,
    })
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Render the canonical manifest for a resolved run. The result parses back
/// into the identical `RunConfig`.
pub fn render_manifest(cfg: &RunConfig, seed: u64) -> String {
    let e = &cfg.experiment;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# run manifest; re-run with: pdmp --config <this file> <subcommand>"
    );
    let _ = writeln!(out, "[model]");
    let _ = writeln!(out, "model = {}", e.model_name);
    for key in ["tau_flow", "sigma"] {
        if let Some(v) = e.model_params.get(key) {
            let _ = writeln!(out, "{key} = {v}");
        }
    }
    let _ = writeln!(out, "x0 = {}", e.x0);
    let _ = writeln!(out, "\n[kernel]");
    let _ = writeln!(out, "kernel = {}", e.kernel_name);
    let _ = writeln!(out, "\n[bandwidths]");
    let _ = writeln!(out, "v1 = {}", e.v1);
    let _ = writeln!(out, "alpha = {}", e.alpha);
    let _ = writeln!(out, "w1 = {}", e.w1);
    let _ = writeln!(out, "beta = {}", e.beta);
    let _ = writeln!(out, "\n[experiment]");
    let _ = writeln!(out, "replicates = {}", e.replicates);
    let _ = writeln!(
        out,
        "n_list = {}",
        e.n_list
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        out,
        "targets = {}",
        e.targets
            .iter()
            .map(|(x, y)| format!("{x}:{y}"))
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(out, "seed = {seed}");
    let _ = writeln!(out, "jumps = {}", cfg.jumps);
    let _ = writeln!(out, "alphas = {}", join_f64(&cfg.alphas));
    let _ = writeln!(out, "betas = {}", join_f64(&cfg.betas));
    let _ = writeln!(out, "pi_points = {}", cfg.pi_points);
    let _ = writeln!(out, "pi_lo = {}", cfg.pi_lo);
    let _ = writeln!(out, "pi_hi = {}", cfg.pi_hi);
    let _ = writeln!(out, "curve_points = {}", cfg.curve_points);
    let _ = writeln!(out, "emit_curve = {}", cfg.emit_curve);
    let _ = writeln!(out, "path_points = {}", cfg.path_points);
    out
}

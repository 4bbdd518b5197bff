//! Flag, config-file and environment resolution into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::model::DEFAULT_N_MAX_CAP;
use rabi_core::validate::{AxisParam, DEFAULT_LEVELS, DEFAULT_THRESHOLD};
use rabi_core::{MethodTag, ModelParams};
use serde::Serialize;

pub const THREADS_ENV: &str = "RABI_THREADS";
pub const N_MAX_CAP_ENV: &str = "RABI_NMAX_CAP";

/// Bad flag values or an unsupported method/parameter combination.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "rabi", version, about = "Spectra, dynamics and validity grids of the biased quantum Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Dynamics,
    Fourier,
    Validate,
    Goldens,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lowest levels per method over a parameter sweep.
    Spectrum(Flags),
    /// Population difference <sigma_z(t)> per method.
    Dynamics(Flags),
    /// Transition peaks of <sigma_z(t)>, or its damped transform with --sampled.
    Fourier(Flags),
    /// Deviation grids against the exact oracle plus the ordering checks.
    Validate(Flags),
    /// Regenerate regression golden files.
    Goldens(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Spectrum(f) => (CommandKind::Spectrum, f),
            Command::Dynamics(f) => (CommandKind::Dynamics, f),
            Command::Fourier(f) => (CommandKind::Fourier, f),
            Command::Validate(f) => (CommandKind::Validate, f),
            Command::Goldens(f) => (CommandKind::Goldens, f),
        }
    }
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s, true).map_err(usage)
    }
}

/// Shared flags. Everything is optional so a `--config` file can fill gaps;
/// energies and couplings are in the same units as `--omega`.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma-separated subset of exact,jcm,adiabatic,grwa,vvp.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// `param:start:stop:count`, values in units of Omega.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// Resonance index override.
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<i64>,
    /// Trace length in units of 1/Omega.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Inverse oscillator temperature as beta hbar Omega.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Damping of the sampled transform, units of Omega.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub amp_cutoff: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; a directory for `validate` and `goldens`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_max_cap: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Points per validity-grid axis (default 40).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Emit the damped transform F(nu) instead of the peak list.
    #[arg(long)]
    pub sampled: bool,
    /// Upper end of the nu grid of the sampled transform, units of Omega.
    #[arg(long)]
    pub nu_max: Option<f64>,
    #[arg(long)]
    pub nu_count: Option<usize>,
    /// Golden suite to regenerate (default: all).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    #[serde(serialize_with = "display")]
    pub param: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

fn display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_all<S: serde::Serializer>(v: &[MethodTag], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.name()))
}

impl FromStr for SweepSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, start, stop, count] = parts[..] else {
            return Err(usage(format!("sweep '{s}' is not param:start:stop:count")));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| usage(format!("bad sweep bound '{v}'")));
        let count: usize = count.trim().parse().map_err(|_| usage(format!("bad sweep count '{count}'")))?;
        if count < 1 {
            return Err(usage("sweep count must be >= 1"));
        }
        Ok(SweepSpec { param: param.parse().map_err(usage_from)?, start: num(start)?, stop: num(stop)?, count })
    }
}

fn usage_from(e: rabi_core::Error) -> anyhow::Error {
    usage(e.to_string())
}

/// Fully resolved run configuration; serialized into every output header.
#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub eps: f64,
    pub delta: f64,
    pub g: f64,
    pub omega: f64,
    #[serde(serialize_with = "display_all")]
    pub methods: Vec<MethodTag>,
    pub levels: usize,
    pub sweep: Option<SweepSpec>,
    pub l: Option<i64>,
    pub t_max: f64,
    pub samples: usize,
    pub beta: f64,
    pub eta: f64,
    pub amp_cutoff: f64,
    pub threshold: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub n_max_cap: usize,
    pub threads: Option<usize>,
    pub grid_points: usize,
    pub sampled: bool,
    pub nu_max: f64,
    pub nu_count: usize,
    pub name: Option<String>,
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.eps, self.delta, self.g, self.omega).map_err(usage_from)
    }
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Dynamics => "dynamics",
            CommandKind::Fourier => "fourier",
            CommandKind::Validate => "validate",
            CommandKind::Goldens => "goldens",
        }
    }
}

/// `key = value` lines; `#` starts a comment. Keys are flag names.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

const CONFIG_KEYS: &[&str] = &[
    "eps", "delta", "g", "omega", "methods", "levels", "sweep", "l", "t-max", "samples", "beta", "eta",
    "amp-cutoff", "threshold", "format", "out", "n-max-cap", "threads", "grid-points", "sampled", "nu-max",
    "nu-count", "name",
];

struct Sources {
    file: BTreeMap<String, String>,
    env: BTreeMap<&'static str, String>,
}

impl Sources {
    /// Flag, then environment, then config file.
    fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        let raw = self.env.get(key).or_else(|| self.file.get(key));
        raw.map(|v| v.parse::<T>().map_err(|e| usage(format!("{key} = '{v}': {e}")))).transpose()
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<MethodTag>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: MethodTag = part.parse().map_err(usage_from)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(usage("no methods given"));
    }
    Ok(out)
}

/// Resolves flags against `--config` and the environment lookup `env`.
pub fn resolve(
    kind: CommandKind,
    flags: Flags,
    env: impl Fn(&str) -> Option<String>,
) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => parse_config_file(&read(path)?)?,
        None => BTreeMap::new(),
    };
    if let Some(bad) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(usage(format!("unknown config key '{bad}'")));
    }
    let mut env_map = BTreeMap::new();
    for (var, key) in [(THREADS_ENV, "threads"), (N_MAX_CAP_ENV, "n-max-cap")] {
        if let Some(v) = env(var).filter(|v| !v.trim().is_empty()) {
            env_map.insert(key, v);
        }
    }
    let src = Sources { file, env: env_map };

    let methods_raw = src.pick(flags.methods, "methods")?;
    let default_methods = match kind {
        CommandKind::Validate => MethodTag::ALL.to_vec(),
        _ => vec![MethodTag::Exact],
    };
    let methods = match methods_raw {
        Some(s) => parse_methods(&s)?,
        None => default_methods,
    };
    let sampled = flags.sampled || src.pick(None::<bool>, "sampled")?.unwrap_or(false);
    let cfg = RunConfig {
        command: kind.name(),
        eps: src.pick(flags.eps, "eps")?.unwrap_or(0.0),
        delta: src.pick(flags.delta, "delta")?.unwrap_or(1.0),
        g: src.pick(flags.g, "g")?.unwrap_or(0.5),
        omega: src.pick(flags.omega, "omega")?.unwrap_or(1.0),
        methods,
        levels: src.pick(flags.levels, "levels")?.unwrap_or(DEFAULT_LEVELS),
        sweep: src.pick(flags.sweep, "sweep")?.map(|s| s.parse()).transpose()?,
        l: src.pick(flags.l, "l")?,
        t_max: src.pick(flags.t_max, "t-max")?.unwrap_or(40.0),
        samples: src.pick(flags.samples, "samples")?.unwrap_or(401),
        beta: src.pick(flags.beta, "beta")?.unwrap_or(10.0),
        eta: src.pick(flags.eta, "eta")?.unwrap_or(rabi_core::dynamics::DEFAULT_ETA),
        amp_cutoff: src.pick(flags.amp_cutoff, "amp-cutoff")?.unwrap_or(rabi_core::dynamics::DEFAULT_AMP_CUTOFF),
        threshold: src.pick(flags.threshold, "threshold")?.unwrap_or(DEFAULT_THRESHOLD),
        format: src.pick(flags.format, "format")?.unwrap_or(Format::Csv),
        out: src.pick(flags.out, "out")?,
        n_max_cap: src.pick(flags.n_max_cap, "n-max-cap")?.unwrap_or(DEFAULT_N_MAX_CAP),
        threads: src.pick(flags.threads, "threads")?,
        grid_points: src.pick(flags.grid_points, "grid-points")?.unwrap_or(40),
        sampled,
        nu_max: src.pick(flags.nu_max, "nu-max")?.unwrap_or(4.0),
        nu_count: src.pick(flags.nu_count, "nu-count")?.unwrap_or(801),
        name: src.pick(flags.name, "name")?,
    };
    check(&cfg)?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))
}

fn check(c: &RunConfig) -> Result<()> {
    if c.levels < 1 {
        return Err(usage("levels must be >= 1"));
    }
    if !(c.t_max > 0.0) {
        return Err(usage("t-max must be > 0"));
    }
    if c.samples < 2 {
        return Err(usage("samples must be >= 2"));
    }
    if !(c.beta > 0.0) {
        return Err(usage("beta must be > 0"));
    }
    if !(c.eta > 0.0) || !(c.amp_cutoff >= 0.0) || !(c.threshold > 0.0) {
        return Err(usage("eta and threshold must be > 0, amp-cutoff >= 0"));
    }
    if c.n_max_cap < 2 || c.threads == Some(0) || c.grid_points < 1 {
        return Err(usage("n-max-cap must be >= 2, threads and grid-points >= 1"));
    }
    if !(c.nu_max > 0.0) || c.nu_count < 2 {
        return Err(usage("nu-max must be > 0 and nu-count >= 2"));
    }
    c.params()?;
    Ok(())
}

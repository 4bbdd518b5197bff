use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rabi_core::dynamics::{
    evolve_with, fourier_peaks_with, sampled_transform, uniform_times, DynamicsOptions,
    InitialStateSpec,
};
use rabi_core::validate::{
    error_maps, golden_suites, linspace, method_level_set, pin_goldens, run_assertions, Axis,
    AxisParam, ErrorGrid,
};
use rabi_core::{Error, ModelParams};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{CommandKind, RunConfig, SweepSpec, UsageError};
use crate::output::{Cell, Table};

/// A finished command: the table to emit and whether any check failed.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, failed: false }
    }
}

/// Invalid input and unsupported regimes are usage errors; numerical
/// failures pass through unchanged.
pub fn core_err(e: Error) -> anyhow::Error {
    match e {
        Error::UnsupportedRegime { .. } | Error::InvalidParams(_) | Error::Domain(_) => {
            UsageError(e.to_string()).into()
        }
        other => other.into(),
    }
}

fn meta(cfg: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(cfg) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn no_sweep(cfg: &RunConfig) -> Result<()> {
    if cfg.sweep.is_some() {
        return Err(UsageError(format!("--sweep is not supported by {}", cfg.command)).into());
    }
    Ok(())
}

pub fn run(kind: CommandKind, cfg: &RunConfig) -> Result<Outcome> {
    match kind {
        CommandKind::Spectrum => spectrum(cfg).map(Outcome::ok),
        CommandKind::Dynamics => dynamics(cfg).map(Outcome::ok),
        CommandKind::Fourier => fourier(cfg).map(Outcome::ok),
        CommandKind::Validate => validate(cfg),
        CommandKind::Goldens => goldens(cfg).map(Outcome::ok),
    }
}

/// One row per (sweep value, method, level).
pub fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let base = cfg.params()?;
    let sweep = cfg.sweep.unwrap_or(SweepSpec {
        param: AxisParam::Delta,
        start: base.delta / base.omega,
        stop: base.delta / base.omega,
        count: 1,
    });
    let values = linspace(sweep.start, sweep.stop, sweep.count);
    let points = values
        .iter()
        .map(|&v| sweep.param.apply(&base, v))
        .collect::<rabi_core::Result<Vec<ModelParams>>>()
        .map_err(core_err)?;
    let results = points
        .par_iter()
        .map(|p| {
            cfg.methods
                .iter()
                .map(|&m| method_level_set(m, p, cfg.levels, cfg.l, cfg.n_max_cap))
                .collect::<rabi_core::Result<Vec<_>>>()
        })
        .collect::<rabi_core::Result<Vec<_>>>()
        .map_err(core_err)?;

    let n_max = results.iter().flatten().filter_map(|r| r.1).max();
    let mut m = meta(cfg);
    m.insert("n_max".into(), n_max.map_or(Value::Null, Value::from));
    let mut table = Table::new(
        m,
        vec!["sweep_param", "sweep_value", "method", "level_index", "label", "energy_over_omega"],
    );
    for ((value, p), per_method) in values.iter().zip(&points).zip(&results) {
        for (set, _) in per_method {
            for level in &set.entries {
                table.push(vec![
                    sweep.param.name().into(),
                    (*value).into(),
                    set.method.name().into(),
                    level.index.into(),
                    level.label.to_string().into(),
                    (level.energy / p.omega).into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn dynamics_setup(cfg: &RunConfig) -> Result<(ModelParams, InitialStateSpec, DynamicsOptions)> {
    no_sweep(cfg)?;
    let p = cfg.params()?;
    let spec = InitialStateSpec::new(cfg.beta).map_err(core_err)?;
    let opts = DynamicsOptions { l: cfg.l, n_max: None, n_max_cap: cfg.n_max_cap };
    Ok((p, spec, opts))
}

/// `t_omega, method, sigma_z` rows, methods in the order given.
pub fn dynamics(cfg: &RunConfig) -> Result<Table> {
    let (p, spec, opts) = dynamics_setup(cfg)?;
    let t_omega = uniform_times(cfg.t_max, cfg.samples);
    let times: Vec<f64> = t_omega.iter().map(|t| t / p.omega).collect();
    let traces = cfg
        .methods
        .iter()
        .map(|&m| evolve_with(m, &p, spec, &times, &opts))
        .collect::<rabi_core::Result<Vec<_>>>()
        .map_err(core_err)?;
    let mut m = meta(cfg);
    let n_max: Map<String, Value> =
        traces.iter().map(|tr| (tr.method.name().to_string(), Value::from(tr.n_max))).collect();
    m.insert("n_max".into(), Value::Object(n_max));
    let mut table = Table::new(m, vec!["t_omega", "method", "sigma_z"]);
    for tr in &traces {
        for (t, v) in t_omega.iter().zip(&tr.values) {
            table.push(vec![(*t).into(), tr.method.name().into(), (*v).into()]);
        }
    }
    Ok(table)
}

/// Peak list per method, or the damped transform on a `nu` grid with
/// `--sampled`.
pub fn fourier(cfg: &RunConfig) -> Result<Table> {
    let (p, spec, opts) = dynamics_setup(cfg)?;
    let mut m = meta(cfg);
    let mut n_max = Map::new();
    if cfg.sampled {
        let times: Vec<f64> = uniform_times(cfg.t_max, cfg.samples).iter().map(|t| t / p.omega).collect();
        let nu = linspace(0.0, cfg.nu_max, cfg.nu_count);
        let nu_abs: Vec<f64> = nu.iter().map(|v| v * p.omega).collect();
        let mut rows = Vec::new();
        for &method in &cfg.methods {
            let trace = evolve_with(method, &p, spec, &times, &opts).map_err(core_err)?;
            let f = sampled_transform(&trace, cfg.eta * p.omega, &nu_abs).map_err(core_err)?;
            n_max.insert(method.name().into(), Value::from(trace.n_max));
            for (v, fv) in nu.iter().zip(f) {
                rows.push(vec![method.name().into(), (*v).into(), Cell::from(fv * p.omega)]);
            }
        }
        m.insert("n_max".into(), Value::Object(n_max));
        let mut table = Table::new(m, vec!["method", "nu_over_Omega", "F"]);
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(table);
    }
    let spectra = cfg
        .methods
        .iter()
        .map(|&method| fourier_peaks_with(method, &p, spec, cfg.amp_cutoff, &opts))
        .collect::<rabi_core::Result<Vec<_>>>()
        .map_err(core_err)?;
    let mut totals = Map::new();
    for sp in &spectra {
        n_max.insert(sp.method.name().into(), Value::from(sp.n_max));
        totals.insert(sp.method.name().into(), Value::from(sp.total_amplitude));
    }
    m.insert("n_max".into(), Value::Object(n_max));
    m.insert("total_amplitude".into(), Value::Object(totals));
    let mut table = Table::new(m, vec!["method", "omega_over_Omega", "amplitude", "group"]);
    for sp in &spectra {
        for pk in &sp.peaks {
            table.push(vec![
                sp.method.name().into(),
                (pk.frequency / p.omega).into(),
                pk.amplitude.into(),
                pk.group.into(),
            ]);
        }
    }
    Ok(table)
}

fn grid_table(cfg: &RunConfig, grid: &ErrorGrid) -> Table {
    let mut m = meta(cfg);
    m.insert("method".into(), Value::from(grid.method.name()));
    m.insert("k".into(), Value::from(grid.k));
    m.insert("oracle_tol".into(), Value::from(rabi_core::validate::ORACLE_TOL));
    m.insert("n_max".into(), Value::from(grid.oracle_n_max));
    let (a, b) = &grid.axes;
    let mut table = Table::new(m, vec![a.param.name(), b.param.name(), "max_error_over_omega"]);
    for (i, row) in grid.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            table.push(vec![a.values[i].into(), b.values[j].into(), cell.unwrap_or(f64::NAN).into()]);
        }
    }
    table
}

fn write_file(path: &Path, table: &Table, cfg: &RunConfig) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    table.write(cfg.format, &mut f)
}

/// Error grids on the default `(Delta, g)` axes plus the ordering checks.
/// Grids are written to `--out` (a directory) when given; the returned table
/// is the check summary.
pub fn validate(cfg: &RunConfig) -> Result<Outcome> {
    no_sweep(cfg)?;
    let fixed = cfg.params()?;
    let n = cfg.grid_points;
    let delta_axis = Axis::linear(AxisParam::Delta, 0.1, 2.0, n);
    let g_axis = Axis::log(AxisParam::G, 0.01, 2.0, n);
    let grids = error_maps(&cfg.methods, &delta_axis, &g_axis, &fixed, cfg.levels, cfg.n_max_cap)
        .map_err(core_err)?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let ext = match cfg.format {
            crate::config::Format::Csv => "csv",
            crate::config::Format::Json => "json",
        };
        for grid in &grids {
            write_file(&dir.join(format!("{}.{ext}", grid.method.name())), &grid_table(cfg, grid), cfg)?;
        }
    }
    let checks = run_assertions(&cfg.methods, cfg.threshold, cfg.n_max_cap);
    let mut m = meta(cfg);
    let maxima: Map<String, Value> = grids
        .iter()
        .map(|g| (g.method.name().to_string(), g.max_error().map_or(Value::Null, Value::from)))
        .collect();
    m.insert("max_error".into(), Value::Object(maxima));
    m.insert("n_max".into(), Value::from(grids.iter().map(|g| g.oracle_n_max).max().unwrap_or(0)));
    let mut table = Table::new(m, vec!["check", "passed", "detail"]);
    for c in &checks {
        table.push(vec![c.name.clone().into(), (if c.passed { "true" } else { "false" }).into(), c.detail.clone().into()]);
    }
    Ok(Outcome { table, failed: checks.iter().any(|c| !c.passed) })
}

/// Rewrites `<out>/<suite>.csv` for one suite or all of them.
pub fn goldens(cfg: &RunConfig) -> Result<Table> {
    let dir = cfg.out.as_ref().ok_or_else(|| UsageError("goldens needs --out <dir>".into()))?;
    let names: Vec<String> = match &cfg.name {
        Some(n) => vec![n.clone()],
        None => golden_suites().iter().map(|s| s.name.to_string()).collect(),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let rendered = names
        .par_iter()
        .map(|n| pin_goldens(n).map(|text| (n, text)))
        .collect::<rabi_core::Result<Vec<_>>>()
        .map_err(core_err)?;
    let mut table = Table::new(meta(cfg), vec!["suite", "file"]);
    for (name, text) in rendered {
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        table.push(vec![name.as_str().into(), path.display().to_string().into()]);
    }
    Ok(table)
}

//! Where each approximation holds: deviation grids against the exact
//! oracle, the qualitative ordering checks they must satisfy, the
//! perturbative validity ratio and regression goldens.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::closedform::{adiabatic_levels, grwa_levels, jcm_levels};
use crate::dynamics::{evolve, uniform_times, InitialStateSpec};
use crate::error::{Error, Result};
use crate::model::{
    converged_spectrum_with_cap, LevelSet, MethodTag, ModelParams, DEFAULT_N_MAX_CAP,
};
use crate::specfun::dressed_delta;
use crate::vvp::{choose_l, doublet_count, first_doublet, vvp_levels_with_l};

/// Oracle convergence tolerance for error grids, units of Omega.
pub const ORACLE_TOL: f64 = 1e-8;
/// Default validity threshold: max first-8-level error below this, units of Omega.
pub const DEFAULT_THRESHOLD: f64 = 0.02;
pub const DEFAULT_LEVELS: usize = 8;

/// Parameter varied along a grid or sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisParam {
    Eps,
    Delta,
    G,
    /// `delta_b - Omega`; sets `Delta = sqrt((Omega + d)^2 - eps^2)`.
    Detuning,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Eps => "eps",
            AxisParam::Delta => "delta",
            AxisParam::G => "g",
            AxisParam::Detuning => "omega-detuning",
        }
    }

    /// Returns `base` with this parameter set to `value` (in units of Omega).
    pub fn apply(self, base: &ModelParams, value: f64) -> Result<ModelParams> {
        let mut p = *base;
        match self {
            AxisParam::Eps => p.eps = value * p.omega,
            AxisParam::Delta => p.delta = value * p.omega,
            AxisParam::G => p.g = value * p.omega,
            AxisParam::Detuning => {
                let qubit = p.omega * (1.0 + value);
                let d2 = qubit * qubit - p.eps * p.eps;
                if qubit < 0.0 || d2 < 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "detuning {value} gives a qubit splitting below |eps|"
                    )));
                }
                p.delta = d2.sqrt();
            }
        }
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eps" => Ok(AxisParam::Eps),
            "delta" => Ok(AxisParam::Delta),
            "g" => Ok(AxisParam::G),
            "omega-detuning" | "detuning" => Ok(AxisParam::Detuning),
            other => Err(Error::InvalidParams(format!("unknown axis parameter '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    /// Values in units of Omega.
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linear(param: AxisParam, start: f64, stop: f64, count: usize) -> Self {
        Self { param, values: linspace(start, stop, count) }
    }

    pub fn log(param: AxisParam, start: f64, stop: f64, count: usize) -> Self {
        let values = linspace(start.ln(), stop.ln(), count).into_iter().map(f64::exp).collect();
        Self { param, values }
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

pub fn default_delta_axis() -> Axis {
    Axis::linear(AxisParam::Delta, 0.1, 2.0, 40)
}

pub fn default_g_axis() -> Axis {
    Axis::log(AxisParam::G, 0.01, 2.0, 40)
}

/// Number of levels a closed-form ladder must produce so its lowest `k`
/// are complete.
fn ladder_j_max(params: &ModelParams, l: i64, k: usize) -> usize {
    first_doublet(l) + doublet_count(params, k)
}

/// Labeled lowest `k` levels of `method` and, for the oracle, the
/// truncation it converged at.
pub fn method_level_set(
    method: MethodTag,
    params: &ModelParams,
    k: usize,
    l: Option<i64>,
    n_max_cap: usize,
) -> Result<(LevelSet, Option<usize>)> {
    let l = l.unwrap_or_else(|| choose_l(params));
    let (mut set, n_max) = match method {
        MethodTag::Exact => {
            let tol = ORACLE_TOL * params.omega;
            let c = converged_spectrum_with_cap(params, k, tol, n_max_cap)?;
            (c.levels, Some(c.n_max))
        }
        MethodTag::Jcm => (jcm_levels(params, k)?, None),
        MethodTag::Adiabatic => (adiabatic_levels(params, l, ladder_j_max(params, l, k))?, None),
        MethodTag::Grwa => (grwa_levels(params, ladder_j_max(params, 0, k))?, None),
        MethodTag::Vvp => (vvp_levels_with_l(params, k, l)?, None),
    };
    set.entries.truncate(k);
    Ok((set, n_max))
}

/// Lowest `k` levels of `method` (energies only, ascending).
pub fn method_levels(
    method: MethodTag,
    params: &ModelParams,
    k: usize,
    l: Option<i64>,
    n_max_cap: usize,
) -> Result<Vec<f64>> {
    Ok(method_level_set(method, params, k, l, n_max_cap)?.0.energies())
}

/// Max over the first `k` levels of `|E_method - E_exact|` (units of Omega)
/// and the oracle truncation used.
pub fn level_error(method: MethodTag, params: &ModelParams, k: usize, cap: usize) -> Result<(f64, usize)> {
    let oracle = converged_spectrum_with_cap(params, k, ORACLE_TOL * params.omega, cap)?;
    let err = deviation(method, params, &oracle.levels.energies(), k, cap)?;
    Ok((err, oracle.n_max))
}

fn deviation(method: MethodTag, params: &ModelParams, exact: &[f64], k: usize, cap: usize) -> Result<f64> {
    if method == MethodTag::Exact {
        return Ok(0.0);
    }
    let approx = method_levels(method, params, k, None, cap)?;
    if approx.len() < k {
        return Err(Error::InvalidParams(format!("{method} produced fewer than {k} levels")));
    }
    let err = exact.iter().zip(&approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(err / params.omega)
}

/// Deviation grid of one method. `cells[i][j]` belongs to
/// `(axes.0.values[i], axes.1.values[j])`; `None` marks a cell where the
/// method or the oracle failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrid {
    pub method: MethodTag,
    pub axes: (Axis, Axis),
    pub fixed: ModelParams,
    pub k: usize,
    pub cells: Vec<Vec<Option<f64>>>,
    /// Largest oracle truncation over the grid.
    pub oracle_n_max: usize,
}

impl ErrorGrid {
    pub fn max_error(&self) -> Option<f64> {
        self.cells.iter().flatten().flatten().copied().reduce(f64::max)
    }

    /// CSV with `#` metadata lines; missing cells are written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let f = &self.fixed;
        let _ = writeln!(s, "# method={}", self.method);
        let _ = writeln!(s, "# fixed eps={} delta={} g={} omega={}", f.eps, f.delta, f.g, f.omega);
        let _ = writeln!(s, "# k={} oracle_tol={} oracle_n_max={}", self.k, ORACLE_TOL, self.oracle_n_max);
        let (a, b) = (&self.axes.0, &self.axes.1);
        let _ = writeln!(s, "{},{},max_error_over_omega", a.param, b.param);
        for (i, row) in self.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let v = cell.map_or_else(|| "nan".to_string(), |v| v.to_string());
                let _ = writeln!(s, "{},{},{}", a.values[i], b.values[j], v);
            }
        }
        s
    }
}

pub fn error_map(
    method: MethodTag,
    axis1: &Axis,
    axis2: &Axis,
    fixed: &ModelParams,
    k: usize,
) -> Result<ErrorGrid> {
    error_map_with_cap(method, axis1, axis2, fixed, k, DEFAULT_N_MAX_CAP)
}

pub fn error_map_with_cap(
    method: MethodTag,
    axis1: &Axis,
    axis2: &Axis,
    fixed: &ModelParams,
    k: usize,
    cap: usize,
) -> Result<ErrorGrid> {
    let mut grids = error_maps(&[method], axis1, axis2, fixed, k, cap)?;
    Ok(grids.remove(0))
}

/// Grids for several methods sharing one oracle solve per cell. Cells are
/// evaluated in parallel; assembly order is fixed by the axes.
pub fn error_maps(
    methods: &[MethodTag],
    axis1: &Axis,
    axis2: &Axis,
    fixed: &ModelParams,
    k: usize,
    cap: usize,
) -> Result<Vec<ErrorGrid>> {
    fixed.validate()?;
    for &method in methods {
        if method == MethodTag::Grwa || method == MethodTag::Jcm {
            let biased = fixed.eps != 0.0
                || [axis1, axis2]
                    .iter()
                    .any(|a| a.param == AxisParam::Eps && a.values.iter().any(|&v| v != 0.0));
            if biased {
                return Err(Error::UnsupportedRegime {
                    method: method.name(),
                    reason: "error grids need eps = 0 for this method".into(),
                });
            }
        }
    }
    let (n1, n2) = (axis1.values.len(), axis2.values.len());
    let flat: Vec<(Option<usize>, Vec<Option<f64>>)> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n2, idx % n2);
            let point = axis1
                .param
                .apply(fixed, axis1.values[i])
                .and_then(|p| axis2.param.apply(&p, axis2.values[j]));
            let Ok(p) = point else {
                return (None, vec![None; methods.len()]);
            };
            let Ok(oracle) = converged_spectrum_with_cap(&p, k, ORACLE_TOL * p.omega, cap) else {
                return (None, vec![None; methods.len()]);
            };
            let exact = oracle.levels.energies();
            let errs = methods
                .iter()
                .map(|&m| deviation(m, &p, &exact, k, cap).ok())
                .collect();
            (Some(oracle.n_max), errs)
        })
        .collect();
    let oracle_n_max = flat.iter().filter_map(|c| c.0).max().unwrap_or(0);
    Ok(methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| ErrorGrid {
            method,
            axes: (axis1.clone(), axis2.clone()),
            fixed: *fixed,
            k,
            cells: flat.chunks(n2.max(1)).map(|row| row.iter().map(|c| c.1[mi]).collect()).collect(),
            oracle_n_max,
        })
        .collect())
}

/// `max |Delta_j^{j+k} / 2| / |eps - k Omega|` over `j <= j_max`,
/// `|k| <= k_max`, `k != l`, `j + k >= 0`.
pub fn validity_ratio(params: &ModelParams, l: i64, j_max: usize, k_max: usize) -> Result<f64> {
    params.validate()?;
    let alpha = params.alpha();
    let mut worst: f64 = 0.0;
    for j in 0..=j_max {
        for k in -(k_max as i64)..=k_max as i64 {
            if k == l || (j as i64 + k) < 0 {
                continue;
            }
            let den = params.eps - k as f64 * params.omega;
            if den.abs() <= 1e-12 * params.omega {
                return Err(Error::DegenerateDenominator {
                    spin: crate::model::Spin::Down,
                    j,
                    k,
                    l,
                });
            }
            let d = dressed_delta(j, (j as i64 + k) as usize, params.delta, alpha);
            worst = worst.max((0.5 * d).abs() / den.abs());
        }
    }
    Ok(worst)
}

/// Outcome of one qualitative or threshold check.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Point on which a method is expected to be valid at the default threshold.
fn reference_point(method: MethodTag) -> Option<(f64, f64)> {
    match method {
        MethodTag::Vvp => Some((0.5, 1.0)),
        MethodTag::Adiabatic => Some((0.2, 1.0)),
        MethodTag::Grwa | MethodTag::Jcm => Some((1.0, 0.01)),
        MethodTag::Exact => None,
    }
}

fn point_error(method: MethodTag, delta: f64, g: f64, k: usize, cap: usize) -> Result<f64> {
    let p = ModelParams::new(0.0, delta, g, 1.0)?;
    Ok(level_error(method, &p, k, cap)?.0)
}

/// Qualitative orderings of the zero-bias validity regimes plus a
/// threshold check at each requested method's reference point. Only checks
/// involving a requested method are evaluated.
pub fn run_assertions(methods: &[MethodTag], threshold: f64, cap: usize) -> Vec<Assertion> {
    let k = DEFAULT_LEVELS;
    let mut out = Vec::new();
    let mut check = |name: &str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        out.push(Assertion { name: name.to_string(), passed, detail });
    };
    let has = |m| methods.contains(&m);
    if has(MethodTag::Vvp) {
        check(
            "vvp_negative_detuning_better",
            (|| {
                let a = point_error(MethodTag::Vvp, 0.5, 0.1, k, cap)?;
                let b = point_error(MethodTag::Vvp, 1.5, 0.1, k, cap)?;
                Ok((a < b, format!("err(0.5, 0.1) = {a:.6} vs err(1.5, 0.1) = {b:.6}")))
            })(),
        );
        check(
            "vvp_strong_coupling_recovers",
            (|| {
                let a = point_error(MethodTag::Vvp, 1.5, 1.5, k, cap)?;
                let b = point_error(MethodTag::Vvp, 1.5, 0.1, k, cap)?;
                Ok((a < b, format!("err(1.5, 1.5) = {a:.6} vs err(1.5, 0.1) = {b:.6}")))
            })(),
        );
    }
    if has(MethodTag::Jcm) {
        check(
            "jcm_fails_at_intermediate_coupling",
            (|| {
                let worst = default_delta_axis()
                    .values
                    .par_iter()
                    .map(|&d| point_error(MethodTag::Jcm, d, 0.5, k, cap))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok((worst > 0.05, format!("max err on g = 0.5 row = {worst:.6}")))
            })(),
        );
    }
    if has(MethodTag::Exact) {
        check(
            "exact_self_consistent",
            (|| {
                let e = point_error(MethodTag::Exact, 1.0, 1.0, k, cap)?;
                Ok((e == 0.0, format!("err = {e}")))
            })(),
        );
    }
    for &m in methods {
        if let Some((d, g)) = reference_point(m) {
            check(
                &format!("{m}_valid_at_reference"),
                (|| {
                    let e = point_error(m, d, g, k, cap)?;
                    Ok((e < threshold, format!("err({d}, {g}) = {e:.6}, threshold {threshold}")))
                })(),
            );
        }
    }
    out
}

/// Canonical parameter sets for regression goldens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GoldenKind {
    /// Exact levels along a sweep of `param` over `values` (units of Omega).
    Levels { param: AxisParam, start: f64, stop: f64, count: usize },
    /// Exact `<sigma_z(t)>` on `[0, t_max]` at `beta hbar Omega = 10`.
    Trace { t_max: f64, samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSuite {
    pub name: &'static str,
    pub base: ModelParams,
    pub kind: GoldenKind,
}

pub const GOLDEN_VERSION: u32 = 1;
pub const GOLDEN_LEVELS: usize = 8;
pub const GOLDEN_LEVEL_TOL: f64 = 1e-9;
pub const GOLDEN_TRACE_TOL: f64 = 1e-7;
const GOLDEN_BETA: f64 = 10.0;

const fn mp(eps: f64, delta: f64, g: f64) -> ModelParams {
    ModelParams { eps, delta, g, omega: 1.0 }
}

const fn det(start: f64) -> GoldenKind {
    GoldenKind::Levels { param: AxisParam::Detuning, start, stop: 2.0, count: 15 }
}

const fn gsweep() -> GoldenKind {
    GoldenKind::Levels { param: AxisParam::G, start: 0.0, stop: 2.0, count: 11 }
}

const TRACE: GoldenKind = GoldenKind::Trace { t_max: 40.0, samples: 401 };

pub fn golden_suites() -> Vec<GoldenSuite> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        GoldenSuite { name: "detuning-g0.1", base: mp(0.0, 1.0, 0.1), kind: det(-0.8) },
        GoldenSuite { name: "detuning-g0.5", base: mp(0.0, 1.0, 0.5), kind: det(-0.8) },
        GoldenSuite { name: "detuning-g1.0", base: mp(0.0, 1.0, 1.0), kind: det(-0.8) },
        GoldenSuite { name: "detuning-g1.5", base: mp(0.0, 1.0, 1.5), kind: det(-0.8) },
        GoldenSuite { name: "coupling-d0.5", base: mp(0.0, 0.5, 0.0), kind: gsweep() },
        GoldenSuite { name: "coupling-d1.0", base: mp(0.0, 1.0, 0.0), kind: gsweep() },
        GoldenSuite { name: "coupling-d1.5", base: mp(0.0, 1.5, 0.0), kind: gsweep() },
        GoldenSuite {
            name: "bias-d1.0-g1.0",
            base: mp(0.0, 1.0, 1.0),
            kind: GoldenKind::Levels { param: AxisParam::Eps, start: 0.0, stop: 3.0, count: 13 },
        },
        GoldenSuite { name: "coupling-e1.0-d0.5", base: mp(1.0, 0.5, 0.0), kind: gsweep() },
        GoldenSuite { name: "coupling-e1.0-d1.0", base: mp(1.0, 1.0, 0.0), kind: gsweep() },
        GoldenSuite { name: "coupling-e1.0-d1.5", base: mp(1.0, 1.5, 0.0), kind: gsweep() },
        GoldenSuite { name: "coupling-e3.0-d1.5", base: mp(3.0, 1.5, 0.0), kind: gsweep() },
        GoldenSuite { name: "trace-d0.5-g1.0", base: mp(0.0, 0.5, 1.0), kind: TRACE },
        GoldenSuite { name: "trace-d0.5-g2.0", base: mp(0.0, 0.5, 2.0), kind: TRACE },
        GoldenSuite { name: "trace-diag-g1.0", base: mp(half, half, 1.0), kind: TRACE },
        GoldenSuite { name: "trace-e1.5-d0.5-g1.0", base: mp(1.5, 0.5, 1.0), kind: TRACE },
    ]
}

pub fn golden_suite(name: &str) -> Result<GoldenSuite> {
    golden_suites()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidParams(format!("unknown golden suite '{name}'")))
}

/// Rows of a golden file: `(key columns, value)`.
type GoldenRows = Vec<(String, f64)>;

fn golden_rows(suite: &GoldenSuite) -> Result<(GoldenRows, String)> {
    let mut rows = Vec::new();
    match suite.kind {
        GoldenKind::Levels { param, start, stop, count } => {
            let mut n_max = 0;
            for v in linspace(start, stop, count) {
                let p = param.apply(&suite.base, v)?;
                let tol = GOLDEN_LEVEL_TOL * 0.1 * p.omega;
                let conv = converged_spectrum_with_cap(&p, GOLDEN_LEVELS, tol, DEFAULT_N_MAX_CAP)?;
                n_max = n_max.max(conv.n_max);
                for (i, e) in conv.levels.energies().iter().enumerate() {
                    rows.push((format!("{v},{i}"), e / p.omega));
                }
            }
            let header = format!("# sweep={param} start={start} stop={stop} count={count} n_max={n_max}\n{param},level_index,energy_over_omega\n");
            Ok((rows, header))
        }
        GoldenKind::Trace { t_max, samples } => {
            let spec = InitialStateSpec::new(GOLDEN_BETA)?;
            let tr = evolve(MethodTag::Exact, &suite.base, spec, &uniform_times(t_max, samples))?;
            for (t, v) in tr.times.iter().zip(&tr.values) {
                rows.push((format!("{t}"), *v));
            }
            let header = format!("# beta_hbar_omega={GOLDEN_BETA} n_max={}\nt_omega,sigma_z\n", tr.n_max);
            Ok((rows, header))
        }
    }
}

/// Renders the golden CSV for `suite`: `#` header naming version, suite,
/// method, parameters, truncation and tolerance, then data rows.
pub fn pin_goldens(name: &str) -> Result<String> {
    let suite = golden_suite(name)?;
    let (rows, header) = golden_rows(&suite)?;
    let b = &suite.base;
    let tol = match suite.kind {
        GoldenKind::Levels { .. } => GOLDEN_LEVEL_TOL,
        GoldenKind::Trace { .. } => GOLDEN_TRACE_TOL,
    };
    let mut s = String::new();
    let _ = writeln!(s, "# rabi-golden v{GOLDEN_VERSION}");
    let _ = writeln!(s, "# suite={} method=exact tolerance={tol}", suite.name);
    let _ = writeln!(s, "# eps={} delta={} g={} omega={}", b.eps, b.delta, b.g, b.omega);
    s.push_str(&header);
    for (key, v) in rows {
        let _ = writeln!(s, "{key},{v}");
    }
    Ok(s)
}

/// Regenerates `name` and returns the largest deviation from the stored
/// golden text, failing on any structural mismatch.
pub fn compare_golden(name: &str, stored: &str) -> Result<f64> {
    let fresh = pin_goldens(name)?;
    let data = |s: &str| -> Vec<String> {
        s.lines().filter(|l| !l.starts_with('#')).skip(1).map(str::to_string).collect()
    };
    let (a, b) = (data(&fresh), data(stored));
    if a.len() != b.len() {
        return Err(Error::InvalidParams(format!(
            "golden '{name}' has {} rows, regenerated {}",
            b.len(),
            a.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(&b) {
        let (kx, vx) = x.rsplit_once(',').unwrap_or((x, ""));
        let (ky, vy) = y.rsplit_once(',').unwrap_or((y, ""));
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidParams(format!("bad golden value '{v}' in '{name}'")))
        };
        if kx != ky {
            return Err(Error::InvalidParams(format!("golden '{name}' key mismatch: {kx} vs {ky}")));
        }
        worst = worst.max((parse(vx)? - parse(vy)?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_construction() {
        let a = default_delta_axis();
        assert_eq!(a.values.len(), 40);
        assert_eq!(a.values[0], 0.1);
        assert!((a.values[39] - 2.0).abs() < 1e-15);
        let g = default_g_axis();
        assert!((g.values[0] - 0.01).abs() < 1e-15);
        assert!((g.values[39] - 2.0).abs() < 1e-12);
        let r = g.values[1] / g.values[0];
        assert!(g.values.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
    }

    #[test]
    fn detuning_axis_sets_qubit_splitting() {
        let base = ModelParams::new(0.6, 0.1, 0.3, 1.0).unwrap();
        let p = AxisParam::Detuning.apply(&base, 0.0).unwrap();
        assert!((p.delta_b() - 1.0).abs() < 1e-14);
        assert!(AxisParam::Detuning.apply(&base, -0.5).is_err());
        assert_eq!("detuning".parse::<AxisParam>().unwrap(), AxisParam::Detuning);
    }

    #[test]
    fn exact_grid_is_zero() {
        let a = Axis::linear(AxisParam::Delta, 0.2, 1.0, 3);
        let b = Axis::linear(AxisParam::G, 0.1, 1.0, 3);
        let grid = error_map(MethodTag::Exact, &a, &b, &ModelParams::new(0.0, 0.5, 0.5, 1.0).unwrap(), 8)
            .unwrap();
        assert_eq!(grid.cells.len(), 3);
        assert!(grid.cells.iter().all(|r| r.len() == 3 && r.iter().all(|c| *c == Some(0.0))));
    }

    #[test]
    fn grid_cells_nonnegative_and_missing_recorded() {
        let a = Axis { param: AxisParam::Delta, values: vec![0.5, -1.0] };
        let b = Axis::linear(AxisParam::G, 0.2, 0.6, 2);
        let grid = error_map(MethodTag::Vvp, &a, &b, &ModelParams::new(0.0, 0.5, 0.5, 1.0).unwrap(), 4)
            .unwrap();
        assert!(grid.cells[0].iter().all(|c| c.is_some_and(|v| v >= 0.0)));
        assert!(grid.cells[1].iter().all(Option::is_none));
        assert!(grid.to_csv().contains("nan"));
    }

    #[test]
    fn grwa_grid_requires_zero_bias() {
        let a = Axis::linear(AxisParam::Delta, 0.2, 1.0, 2);
        let b = Axis::linear(AxisParam::G, 0.1, 1.0, 2);
        let fixed = ModelParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        assert!(matches!(
            error_map(MethodTag::Grwa, &a, &b, &fixed, 4),
            Err(Error::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn validity_ratio_examples() {
        let q = ModelParams::new(0.0, 0.5, 0.0, 1.0).unwrap();
        assert_eq!(validity_ratio(&q, 0, 5, 5).unwrap(), 0.0);
        let strong = ModelParams::new(0.0, 0.5, 2.0, 1.0).unwrap();
        assert!(validity_ratio(&strong, 0, 3, 5).unwrap() < 0.05);
        let a = validity_ratio(&ModelParams::new(0.0, 0.3, 0.7, 1.0).unwrap(), 0, 5, 6).unwrap();
        let b = validity_ratio(&ModelParams::new(0.0, 0.6, 0.7, 1.0).unwrap(), 0, 5, 6).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-14);
        let bad = ModelParams::new(1.0, 0.5, 0.7, 1.0).unwrap();
        assert!(matches!(validity_ratio(&bad, 0, 3, 3), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn golden_rendering_is_deterministic() {
        let a = pin_goldens("detuning-g0.1").unwrap();
        let b = pin_goldens("detuning-g0.1").unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("# rabi-golden v1\n"));
        assert_eq!(compare_golden("detuning-g0.1", &a).unwrap(), 0.0);
        assert!(pin_goldens("no-such-suite").is_err());
    }

    #[test]
    fn golden_compare_detects_drift() {
        let a = pin_goldens("coupling-d0.5").unwrap();
        let last = a.lines().last().unwrap();
        let (key, v) = last.rsplit_once(',').unwrap();
        let bumped = format!("{key},{}", v.parse::<f64>().unwrap() + 1e-6);
        let drifted = a.replace(last, &bumped);
        assert!(compare_golden("coupling-d0.5", &drifted).unwrap() > 5e-7);
    }
}

//! Population difference `<sigma_z(t)>` after preparing the qubit in `|up>`
//! with the oscillator in thermal equilibrium, propagated in the eigenbasis
//! of any method that supplies states.
//!
//! Approximate bases are used as they come: the initial state is expanded in
//! the dual basis (inverse Gram matrix) and never re-orthogonalized.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    basis_index, build_hamiltonian, converged_spectrum_with_cap, exact_eigs, Branch,
    FockTruncation, MethodTag, ModelParams, Spin, DEFAULT_N_MAX_CAP,
};
use crate::vvp::{
    assemble_doublet, choose_l, doublet_solution, unpaired_energy, unpaired_states,
    DisplacedBasis, DoubletIndex, Generator, StateKind,
};

/// Levels whose convergence fixes the truncation used for dynamics.
pub const DYNAMICS_LEVELS: usize = 16;
/// Convergence tolerance (units of Omega) for that truncation.
pub const DYNAMICS_TOL: f64 = 1e-8;
/// Transitions closer than this (units of Omega) are merged into one peak.
pub const PEAK_MERGE_TOL: f64 = 1e-9;
pub const DEFAULT_AMP_CUTOFF: f64 = 1e-4;
/// Default damping of the sampled transform, units of Omega.
pub const DEFAULT_ETA: f64 = 0.01;

/// Thermal weights below this fraction of the ground weight are skipped.
const WEIGHT_FLOOR: f64 = 1e-16;

/// Qubit in `|up>`, oscillator thermal at inverse temperature
/// `beta_hbar_omega` (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec {
    pub beta_hbar_omega: f64,
}

impl InitialStateSpec {
    pub fn new(beta_hbar_omega: f64) -> Result<Self> {
        if !(beta_hbar_omega > 0.0) {
            return Err(Error::InvalidParams(format!(
                "beta_hbar_omega must be > 0, got {beta_hbar_omega}"
            )));
        }
        Ok(Self { beta_hbar_omega })
    }
}

/// `p_j ~ exp(-beta hbar Omega j)`, renormalized over `j < n_max`.
pub fn thermal_weights(spec: InitialStateSpec, n_max: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_max.max(1))
        .map(|j| if j == 0 { 1.0 } else { (-spec.beta_hbar_omega * j as f64).exp() })
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / z).collect()
}

/// Knobs shared by every dynamics entry point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsOptions {
    /// Resonance index for VVP and adiabatic; `choose_l` when `None`.
    pub l: Option<i64>,
    /// Fixed truncation; converged automatically when `None`.
    pub n_max: Option<usize>,
    pub n_max_cap: usize,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self { l: None, n_max: None, n_max_cap: DEFAULT_N_MAX_CAP }
    }
}

/// Energies and bare-basis eigenvectors of one method, ascending in energy.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub method: MethodTag,
    pub trunc: FockTruncation,
    pub energies: Vec<f64>,
    /// One column per eigenstate.
    pub states: DMatrix<f64>,
    /// Whether the columns are orthonormal by construction.
    pub orthonormal: bool,
}

impl Eigenbasis {
    pub fn new(method: MethodTag, params: &ModelParams, opts: &DynamicsOptions) -> Result<Self> {
        params.validate()?;
        if method == MethodTag::Grwa {
            return Err(Error::UnsupportedRegime {
                method: "grwa",
                reason: "no eigenstates are available, only energies".into(),
            });
        }
        if method == MethodTag::Jcm && params.eps != 0.0 {
            return Err(Error::UnsupportedRegime {
                method: "jcm",
                reason: format!("defined only for eps = 0, got eps = {}", params.eps),
            });
        }
        let n_max = match opts.n_max {
            Some(n) => n,
            None => {
                let tol = DYNAMICS_TOL * params.omega;
                converged_spectrum_with_cap(params, DYNAMICS_LEVELS, tol, opts.n_max_cap)?.n_max
            }
        };
        let trunc = FockTruncation::new(n_max)?;
        let l = opts.l.unwrap_or_else(|| choose_l(params));
        let (energies, states, orthonormal) = match method {
            MethodTag::Exact => {
                let eig = exact_eigs(&build_hamiltonian(params, trunc), trunc.dim())?;
                (eig.values, eig.vectors, true)
            }
            MethodTag::Jcm => {
                let (e, s) = jcm_basis(params, trunc);
                (e, s, true)
            }
            MethodTag::Adiabatic => {
                let basis = DisplacedBasis::new(params, l, trunc)?;
                let (e, c0) = zeroth_order_coordinates(params, &basis, false)?;
                (e, basis.matrix() * c0, true)
            }
            MethodTag::Vvp => {
                if params.delta == 0.0 {
                    return Err(Error::InvalidParams(
                        "vvp states need delta > 0 (mixing angle undefined)".into(),
                    ));
                }
                let gen = Generator::new(params, l, trunc)?;
                let (e, c0) = zeroth_order_coordinates(params, gen.basis(), true)?;
                (e, gen.basis().matrix() * (gen.transform() * c0), false)
            }
            MethodTag::Grwa => unreachable!(),
        };
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let sorted = DMatrix::from_fn(states.nrows(), order.len(), |r, c| states[(r, order[c])]);
        let energies = order.iter().map(|&i| energies[i]).collect();
        Ok(Self { method, trunc, energies, states: sorted, orthonormal })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Expansion coefficients of `|up, n>`: `V^T e` for orthonormal columns,
    /// `G^{-1} V^T e` otherwise.
    pub fn coefficients(&self, n: usize) -> Result<DVector<f64>> {
        let row = basis_index(Spin::Up, n);
        let proj = self.states.row(row).transpose();
        if self.orthonormal {
            return Ok(proj);
        }
        let gram = self.states.transpose() * &self.states;
        let chol = gram.cholesky().ok_or_else(|| {
            Error::InvalidParams("approximate eigenbasis is linearly dependent".into())
        })?;
        Ok(chol.solve(&proj))
    }
}

/// Jaynes-Cummings eigenstates: `|g,0>` alone and the doublets
/// `{|e,j>, |g,j+1>}` in the qubit eigenbasis `|g/e> = (|up> +/- |dn>)/sqrt 2`.
fn jcm_basis(params: &ModelParams, trunc: FockTruncation) -> (Vec<f64>, DMatrix<f64>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let dim = trunc.dim();
    let qubit = |sign: f64, n: usize| {
        let mut v = DVector::zeros(dim);
        v[basis_index(Spin::Up, n)] = r;
        v[basis_index(Spin::Down, n)] = sign * r;
        v
    };
    let ground = |n| qubit(1.0, n);
    let excited = |n| qubit(-1.0, n);
    let (d, w, g) = (params.delta, params.omega, params.g);
    let mut energies = vec![-0.5 * d];
    let mut columns = vec![ground(0)];
    for j in 0..trunc.n_max - 1 {
        let ee = 0.5 * d + j as f64 * w;
        let eg = -0.5 * d + (j + 1) as f64 * w;
        let c = g * ((j + 1) as f64).sqrt();
        let (mean, half) = (0.5 * (ee + eg), (0.25 * (ee - eg).powi(2) + c * c).sqrt());
        // rotation diagonalizing [[ee, c], [c, eg]]
        let phi = 0.5 * (2.0 * c).atan2(ee - eg);
        let (s, co) = phi.sin_cos();
        let (e_vec, g_vec) = (excited(j), ground(j + 1));
        energies.push(mean + half);
        columns.push(&e_vec * co + &g_vec * s);
        energies.push(mean - half);
        columns.push(&g_vec * co - &e_vec * s);
    }
    energies.push(0.5 * d + (trunc.n_max - 1) as f64 * w);
    columns.push(excited(trunc.n_max - 1));
    (energies, DMatrix::from_columns(&columns))
}

/// Energies and zeroth-order displaced coordinates for every doublet member
/// and unpaired state inside the displaced cutoff.
fn zeroth_order_coordinates(
    params: &ModelParams,
    basis: &DisplacedBasis,
    second_order: bool,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let l = basis.l();
    let mut energies = Vec::new();
    let mut columns = Vec::new();
    for j in basis.doublet_range() {
        let sol = if second_order {
            doublet_solution(params, j, l)?
        } else {
            assemble_doublet(params, DoubletIndex::new(j, l)?, 0.0, 0.0)
        };
        for (branch, e) in [(Branch::Minus, sol.energies.0), (Branch::Plus, sol.energies.1)] {
            energies.push(e);
            columns.push(basis.order0_coordinates(StateKind::Doublet(branch), Some(&sol), j));
        }
    }
    for (spin, j) in unpaired_states(l) {
        if j >= basis.n_disp() {
            continue;
        }
        let e = if second_order {
            unpaired_energy(params, spin, j, l)?
        } else {
            params.bare_energy(spin, j)
        };
        energies.push(e);
        columns.push(basis.order0_coordinates(StateKind::Unpaired(spin), None, j));
    }
    Ok((energies, DMatrix::from_columns(&columns)))
}

/// Eigenbasis plus the thermal initial state projected onto it.
pub struct Propagator {
    pub basis: Eigenbasis,
    pub params: ModelParams,
    /// `(p_n, coefficients of |up, n>)` for every non-negligible weight.
    components: Vec<(f64, DVector<f64>)>,
}

impl Propagator {
    pub fn new(
        method: MethodTag,
        params: &ModelParams,
        spec: InitialStateSpec,
        opts: &DynamicsOptions,
    ) -> Result<Self> {
        let basis = Eigenbasis::new(method, params, opts)?;
        let weights = thermal_weights(spec, basis.trunc.n_max);
        let floor = WEIGHT_FLOOR * weights[0];
        let mut components = Vec::new();
        for (n, &p) in weights.iter().enumerate() {
            if p < floor {
                break;
            }
            components.push((p, basis.coefficients(n)?));
        }
        Ok(Self { basis, params: *params, components })
    }

    /// `<sigma_z(t)>` by propagating each thermal component in the bare basis.
    pub fn value(&self, t: f64) -> f64 {
        let e = &self.basis.energies;
        let dim = self.basis.states.nrows();
        let mut total = 0.0;
        for (p, c) in &self.components {
            let re = DVector::from_fn(c.len(), |a, _| c[a] * (e[a] * t).cos());
            let im = DVector::from_fn(c.len(), |a, _| c[a] * (e[a] * t).sin());
            let u = &self.basis.states * re;
            let w = &self.basis.states * im;
            let sz: f64 = (0..dim)
                .map(|i| {
                    let s = if i % 2 == 1 { 1.0 } else { -1.0 };
                    s * (u[i] * u[i] + w[i] * w[i])
                })
                .sum();
            total += p * sz;
        }
        total
    }

    pub fn trace(&self, times: &[f64]) -> Result<DynamicsTrace> {
        check_times(times)?;
        let values = times.par_iter().map(|&t| self.value(t)).collect();
        Ok(DynamicsTrace {
            times: times.to_vec(),
            values,
            method: self.basis.method,
            params: self.params,
            n_max: self.basis.trunc.n_max,
        })
    }

    /// Analytic decomposition `sum_peaks A cos(omega t)`.
    pub fn peaks(&self, amp_cutoff: f64) -> Result<PeakSpectrum> {
        if !(amp_cutoff >= 0.0) {
            return Err(Error::InvalidParams(format!("amp_cutoff must be >= 0, got {amp_cutoff}")));
        }
        let n = self.basis.len();
        let mut weighted = DMatrix::<f64>::zeros(n, n);
        for (p, c) in &self.components {
            weighted.ger(*p, c, c, 1.0);
        }
        let states = &self.basis.states;
        let mut signed = states.clone();
        for (i, mut row) in signed.row_iter_mut().enumerate() {
            if i % 2 == 0 {
                row.neg_mut();
            }
        }
        let z = states.transpose() * signed;
        let e = &self.basis.energies;
        let mut raw = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for g in a..n {
                let factor = if a == g { 1.0 } else { 2.0 };
                let amp = factor * weighted[(a, g)] * z[(a, g)];
                if amp != 0.0 {
                    raw.push(Peak { frequency: e[g] - e[a], amplitude: amp, transition: (a, g), group: 0 });
                }
            }
        }
        raw.sort_by(|x, y| x.frequency.total_cmp(&y.frequency));
        let tol = PEAK_MERGE_TOL * self.params.omega;
        let mut merged: Vec<Peak> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for pk in raw {
            match merged.last_mut() {
                Some(last) if pk.frequency - anchor < tol => {
                    if pk.amplitude.abs() > last.amplitude.abs() {
                        last.transition = pk.transition;
                    }
                    last.amplitude += pk.amplitude;
                }
                _ => {
                    anchor = pk.frequency;
                    merged.push(pk);
                }
            }
        }
        let mut total = 0.0;
        let peaks = merged
            .into_iter()
            .inspect(|pk| total += pk.amplitude)
            .filter(|pk| pk.amplitude.abs() >= amp_cutoff)
            .map(|pk| Peak { group: (pk.frequency / self.params.omega).round() as i64, ..pk })
            .collect();
        Ok(PeakSpectrum {
            method: self.basis.method,
            params: self.params,
            n_max: self.basis.trunc.n_max,
            peaks,
            total_amplitude: total,
        })
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("times must be finite and ascending".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace {
    /// Ascending, units of `1/Omega` when `Omega = 1`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: MethodTag,
    pub params: ModelParams,
    pub n_max: usize,
}

/// One cosine component of `<sigma_z(t)>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Transition frequency `E_gamma - E_alpha >= 0`.
    pub frequency: f64,
    pub amplitude: f64,
    /// Eigenstate indices (ascending energy) of the dominant transition.
    pub transition: (usize, usize),
    /// `round(frequency / Omega)`.
    pub group: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSpectrum {
    pub method: MethodTag,
    pub params: ModelParams,
    pub n_max: usize,
    /// Peaks at or above the amplitude cutoff, ascending in frequency.
    pub peaks: Vec<Peak>,
    /// Sum of all amplitudes before the cutoff; `<sigma_z(0)>`.
    pub total_amplitude: f64,
}

impl PeakSpectrum {
    /// `sum A cos(omega t)` over the retained peaks.
    pub fn reconstruct(&self, t: f64) -> f64 {
        self.peaks.iter().map(|p| p.amplitude * (p.frequency * t).cos()).sum()
    }
}

pub fn evolve(
    method: MethodTag,
    params: &ModelParams,
    spec: InitialStateSpec,
    times: &[f64],
) -> Result<DynamicsTrace> {
    evolve_with(method, params, spec, times, &DynamicsOptions::default())
}

pub fn evolve_with(
    method: MethodTag,
    params: &ModelParams,
    spec: InitialStateSpec,
    times: &[f64],
    opts: &DynamicsOptions,
) -> Result<DynamicsTrace> {
    Propagator::new(method, params, spec, opts)?.trace(times)
}

pub fn fourier_peaks(
    method: MethodTag,
    params: &ModelParams,
    spec: InitialStateSpec,
    amp_cutoff: f64,
) -> Result<PeakSpectrum> {
    fourier_peaks_with(method, params, spec, amp_cutoff, &DynamicsOptions::default())
}

pub fn fourier_peaks_with(
    method: MethodTag,
    params: &ModelParams,
    spec: InitialStateSpec,
    amp_cutoff: f64,
    opts: &DynamicsOptions,
) -> Result<PeakSpectrum> {
    Propagator::new(method, params, spec, opts)?.peaks(amp_cutoff)
}

/// `F(nu) = 2 sum_t dt e^{-eta t} value(t) cos(nu t)` on a uniform grid.
pub fn sampled_transform(trace: &DynamicsTrace, eta: f64, nus: &[f64]) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParams(format!("eta must be > 0, got {eta}")));
    }
    let t = &trace.times;
    if t.len() < 2 {
        return Err(Error::NonUniformGrid);
    }
    let dt = t[1] - t[0];
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
    if !(dt > 0.0) || !uniform {
        return Err(Error::NonUniformGrid);
    }
    let damped: Vec<f64> =
        t.iter().zip(&trace.values).map(|(&ti, &v)| dt * (-eta * ti).exp() * v).collect();
    Ok(nus
        .par_iter()
        .map(|&nu| 2.0 * t.iter().zip(&damped).map(|(&ti, &d)| d * (nu * ti).cos()).sum::<f64>())
        .collect())
}

/// `count` equally spaced samples on `[0, t_max]`.
pub fn uniform_times(t_max: f64, count: usize) -> Vec<f64> {
    let steps = count.max(2) - 1;
    (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(eps: f64, delta: f64, g: f64) -> ModelParams {
        ModelParams::new(eps, delta, g, 1.0).unwrap()
    }

    fn cold() -> InitialStateSpec {
        InitialStateSpec::new(10.0).unwrap()
    }

    #[test]
    fn thermal_weight_examples() {
        let w = thermal_weights(InitialStateSpec::new(f64::INFINITY).unwrap(), 5);
        assert_eq!(w, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let w = thermal_weights(cold(), 30);
        assert_relative_eq!(w[1] / w[0], (-10.0f64).exp(), max_relative = 1e-14);
        let w = thermal_weights(InitialStateSpec::new(0.3).unwrap(), 40);
        assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(InitialStateSpec::new(0.0).is_err());
    }

    #[test]
    fn free_qubit_rabi_flop() {
        let q = p(0.0, 0.7, 0.0);
        let times = uniform_times(100.0, 501);
        let tr = evolve(MethodTag::Exact, &q, cold(), &times).unwrap();
        for (t, v) in tr.times.iter().zip(&tr.values) {
            assert!((v - (0.7 * t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn every_method_starts_at_one() {
        let q = p(0.0, 0.5, 1.0);
        for m in [MethodTag::Exact, MethodTag::Jcm, MethodTag::Adiabatic, MethodTag::Vvp] {
            let tr = evolve(m, &q, cold(), &[0.0, 1.0]).unwrap();
            assert!((tr.values[0] - 1.0).abs() < 1e-9, "{m}: {}", tr.values[0]);
        }
    }

    #[test]
    fn grwa_and_biased_jcm_unsupported() {
        let q = p(0.0, 0.5, 1.0);
        assert!(matches!(
            evolve(MethodTag::Grwa, &q, cold(), &[0.0]),
            Err(Error::UnsupportedRegime { .. })
        ));
        let b = p(0.5, 0.5, 1.0);
        assert!(matches!(
            evolve(MethodTag::Jcm, &b, cold(), &[0.0]),
            Err(Error::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn jcm_basis_orthonormal_and_matches_levels() {
        let q = p(0.0, 0.8, 0.1);
        let b = Eigenbasis::new(MethodTag::Jcm, &q, &DynamicsOptions { n_max: Some(12), ..Default::default() })
            .unwrap();
        let gram = b.states.transpose() * &b.states;
        assert!((gram - DMatrix::identity(b.len(), b.len())).amax() < 1e-14);
        let lv = crate::closedform::jcm_levels(&q, 6).unwrap();
        for (a, e) in lv.energies().iter().zip(&b.energies) {
            assert_relative_eq!(*a, *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn free_qubit_single_peak() {
        let sp = fourier_peaks(MethodTag::Exact, &p(0.0, 0.6, 0.0), cold(), 1e-10).unwrap();
        assert_eq!(sp.peaks.len(), 1);
        assert_relative_eq!(sp.peaks[0].frequency, 0.6, epsilon = 1e-12);
        assert_relative_eq!(sp.peaks[0].amplitude, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jcm_resonant_rabi_splitting() {
        let g = 0.05;
        let sp = fourier_peaks(MethodTag::Jcm, &p(0.0, 1.0, g), cold(), 1e-3).unwrap();
        let mut top = sp.peaks.clone();
        top.sort_by(|a, b| b.amplitude.abs().total_cmp(&a.amplitude.abs()));
        let (a, b) = (top[0].frequency, top[1].frequency);
        assert_relative_eq!((a - b).abs(), 2.0 * g, epsilon = 1e-12);
        assert_relative_eq!(0.5 * (a + b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn peaks_reconstruct_trace() {
        let q = p(0.0, 0.5, 1.0);
        let prop = Propagator::new(MethodTag::Exact, &q, cold(), &DynamicsOptions::default()).unwrap();
        let sp = prop.peaks(0.0).unwrap();
        assert!((sp.total_amplitude - 1.0).abs() < 1e-6);
        for t in [0.0, 0.7, 5.3, 31.0] {
            assert!((prop.value(t) - sp.reconstruct(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn sampled_transform_of_damped_cosine() {
        let times = uniform_times(2000.0, 40001);
        let w0 = 0.8;
        let tr = DynamicsTrace {
            values: times.iter().map(|t| (w0 * t).cos()).collect(),
            times,
            method: MethodTag::Exact,
            params: p(0.0, 0.5, 0.0),
            n_max: 2,
        };
        let eta = 0.01;
        let nus: Vec<f64> = (0..=400).map(|i| 0.6 + 0.001 * i as f64).collect();
        let f = sampled_transform(&tr, eta, &nus).unwrap();
        let imax = (0..f.len()).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
        assert!((nus[imax] - w0).abs() <= 0.001);
        // Lorentzian peak height 1/eta
        assert!((f[imax] * eta - 1.0).abs() < 0.05);
        let half = f[imax] / 2.0;
        let right = nus.iter().zip(&f).find(|(n, v)| **n > w0 && **v < half).unwrap().0;
        assert!((right - w0 - eta).abs() < 0.002);
    }

    #[test]
    fn sampled_transform_constant_peaks_at_zero() {
        let times = uniform_times(1000.0, 10001);
        let tr = DynamicsTrace {
            values: vec![1.0; times.len()],
            times,
            method: MethodTag::Exact,
            params: p(0.0, 0.5, 0.0),
            n_max: 2,
        };
        let nus: Vec<f64> = (0..100).map(|i| 0.01 * i as f64).collect();
        let f = sampled_transform(&tr, 0.01, &nus).unwrap();
        assert!(f.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sampled_transform_rejects_irregular_grid() {
        let tr = DynamicsTrace {
            times: vec![0.0, 1.0, 3.0],
            values: vec![1.0; 3],
            method: MethodTag::Exact,
            params: p(0.0, 0.5, 0.0),
            n_max: 2,
        };
        assert_eq!(sampled_transform(&tr, 0.01, &[0.0]), Err(Error::NonUniformGrid));
    }

    #[test]
    fn exact_trace_bounded() {
        let q = p(0.4, 0.5, 1.2);
        let tr = evolve(MethodTag::Exact, &q, InitialStateSpec::new(2.0).unwrap(), &uniform_times(50.0, 400))
            .unwrap();
        assert!(tr.values.iter().all(|v| v.abs() <= 1.0 + 1e-9));
    }
}

//! Qubit-oscillator Hamiltonian in a truncated product basis and its exact
//! diagonalization. This is the oracle every approximation is checked against.
//!
//! Conventions: `hbar = 1`, the oscillator zero-point energy is dropped, and
//! the bare basis interleaves spin inside each Fock level:
//! `|dn,0>, |up,0>, |dn,1>, |up,1>, ...`.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    /// Eigenvalue of `sigma_z`.
    pub fn sigma(self) -> f64 {
        match self {
            Spin::Down => -1.0,
            Spin::Up => 1.0,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    fn offset(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }
}

/// The four physical frequencies of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Static bias.
    pub eps: f64,
    /// Tunneling element, `>= 0`.
    pub delta: f64,
    /// Qubit-oscillator coupling, `>= 0`.
    pub g: f64,
    /// Oscillator frequency, `> 0`.
    pub omega: f64,
}

impl ModelParams {
    pub fn new(eps: f64, delta: f64, g: f64, omega: f64) -> Result<Self> {
        let p = Self { eps, delta, g, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps, self.delta, self.g, self.omega];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite parameter in {self:?}")));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.delta < 0.0 {
            return Err(Error::InvalidParams(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    /// `(2g/Omega)^2`
    pub fn alpha(&self) -> f64 {
        let r = 2.0 * self.g / self.omega;
        r * r
    }

    /// Qubit splitting `sqrt(eps^2 + delta^2)`.
    pub fn delta_b(&self) -> f64 {
        self.eps.hypot(self.delta)
    }

    /// Qubit-oscillator detuning `delta_b - Omega`.
    pub fn detuning(&self) -> f64 {
        self.delta_b() - self.omega
    }

    /// Unperturbed (`Delta = 0`) energy of the displaced state `|spin, j>~`.
    pub fn bare_energy(&self, spin: Spin, j: usize) -> f64 {
        -0.5 * spin.sigma() * self.eps + j as f64 * self.omega - self.g * self.g / self.omega
    }
}

/// Number of oscillator levels kept; the basis dimension is `2 * n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParams(format!("n_max must be >= 2, got {n_max}")));
        }
        Ok(Self { n_max })
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max
    }
}

pub fn basis_index(spin: Spin, n: usize) -> usize {
    2 * n + spin.offset()
}

/// Real coefficients of a state in the bare product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub coefficients: Vec<f64>,
}

impl StateVector {
    pub fn zeros(trunc: FockTruncation) -> Self {
        Self { coefficients: vec![0.0; trunc.dim()] }
    }

    pub fn basis(trunc: FockTruncation, spin: Spin, n: usize) -> Self {
        let mut s = Self::zeros(trunc);
        s.coefficients[basis_index(spin, n)] = 1.0;
        s
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() / 2
    }

    pub fn get(&self, spin: Spin, n: usize) -> f64 {
        self.coefficients[basis_index(spin, n)]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a * b).sum()
    }

    pub fn axpy(&mut self, a: f64, other: &StateVector) {
        for (x, y) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *x += a * y;
        }
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coefficients)
    }

    /// `<n>` of the oscillator in this state (unnormalized states are
    /// normalized on the fly).
    pub fn mean_photon_number(&self) -> f64 {
        mean_n(self.coefficients.iter().copied())
    }
}

fn mean_n(coeffs: impl Iterator<Item = f64>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, c) in coeffs.enumerate() {
        let w = c * c;
        num += (i / 2) as f64 * w;
        den += w;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Which solver produced a set of levels or a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodTag {
    Exact,
    Jcm,
    Adiabatic,
    Grwa,
    Vvp,
}

impl MethodTag {
    pub const ALL: [MethodTag; 5] =
        [MethodTag::Exact, MethodTag::Jcm, MethodTag::Adiabatic, MethodTag::Grwa, MethodTag::Vvp];

    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Exact => "exact",
            MethodTag::Jcm => "jcm",
            MethodTag::Adiabatic => "adiabatic",
            MethodTag::Grwa => "grwa",
            MethodTag::Vvp => "vvp",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(MethodTag::Exact),
            "jcm" => Ok(MethodTag::Jcm),
            "adiabatic" => Ok(MethodTag::Adiabatic),
            "grwa" => Ok(MethodTag::Grwa),
            "vvp" => Ok(MethodTag::Vvp),
            other => Err(Error::InvalidParams(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelLabel {
    Exact(usize),
    Jcm(usize),
    /// Member of the quasidegenerate pair `(dn, j), (up, j + l)`.
    Doublet { branch: Branch, j: usize, l: i64 },
    /// Displaced state without a degenerate partner.
    Unpaired { spin: Spin, j: usize },
    GrwaGround,
    /// GRWA pair built from `E_{+,j}` and `E_{-,j+1}`.
    GrwaPair { branch: Branch, j: usize },
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |b: &Branch| if *b == Branch::Minus { "-" } else { "+" };
        match self {
            LevelLabel::Exact(k) => write!(f, "exact({k})"),
            LevelLabel::Jcm(k) => write!(f, "jcm({k})"),
            LevelLabel::Doublet { branch, j, l } => write!(f, "doublet({},{j},{l})", b(branch)),
            LevelLabel::Unpaired { spin, j } => {
                let s = if *spin == Spin::Up { "up" } else { "down" };
                write!(f, "unpaired({s},{j})")
            }
            LevelLabel::GrwaGround => write!(f, "grwa(ground)"),
            LevelLabel::GrwaPair { branch, j } => write!(f, "grwa({},{j})", b(branch)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub index: usize,
    pub label: LevelLabel,
    pub energy: f64,
}

/// Labeled energies from one method, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub method: MethodTag,
    pub entries: Vec<Level>,
}

impl LevelSet {
    /// Sorts `(label, energy)` pairs ascending, keeps the lowest `k` and
    /// assigns indices.
    pub fn from_unsorted(method: MethodTag, mut items: Vec<(LevelLabel, f64)>, k: usize) -> Self {
        items.sort_by(|a, b| a.1.total_cmp(&b.1));
        items.truncate(k);
        let entries = items
            .into_iter()
            .enumerate()
            .map(|(index, (label, energy))| Level { index, label, energy })
            .collect();
        Self { method, entries }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `H = -(eps sz + delta sx)/2 + g sz (b + b^dag) + Omega b^dag b` in the
/// interleaved bare basis. Exactly symmetric by construction.
pub fn build_hamiltonian(params: &ModelParams, trunc: FockTruncation) -> DMatrix<f64> {
    let dim = trunc.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..trunc.n_max {
        let osc = n as f64 * params.omega;
        for spin in [Spin::Down, Spin::Up] {
            let i = basis_index(spin, n);
            h[(i, i)] = osc - 0.5 * spin.sigma() * params.eps;
            if n + 1 < trunc.n_max {
                let k = basis_index(spin, n + 1);
                let v = params.g * spin.sigma() * ((n + 1) as f64).sqrt();
                h[(i, k)] = v;
                h[(k, i)] = v;
            }
        }
        let (d, u) = (basis_index(Spin::Down, n), basis_index(Spin::Up, n));
        h[(d, u)] = -0.5 * params.delta;
        h[(u, d)] = -0.5 * params.delta;
    }
    h
}

/// Lowest eigenpairs of a real symmetric matrix; eigenvectors are columns.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

const EIGEN_MAX_ITER: usize = 10_000;

/// The `k` lowest eigenpairs, ascending. Exactly degenerate eigenvalues are
/// ordered by ascending `<n>` of their eigenvectors.
pub fn exact_eigs(h: &DMatrix<f64>, k: usize) -> Result<Eigenpairs> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(Error::InvalidParams("matrix is not square".into()));
    }
    let scale = h.amax().max(f64::MIN_POSITIVE);
    let asym = (h - h.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::InvalidParams(format!("matrix is not symmetric (defect {asym:e})")));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence { iterations: EIGEN_MAX_ITER })?;

    let photon: Vec<f64> =
        (0..dim).map(|c| mean_n(eig.eigenvectors.column(c).iter().copied())).collect();
    let tie = 1e-12 * scale;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // within runs of equal eigenvalues, order by <n>
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= tie {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| photon[a].total_cmp(&photon[b]));
        start = end;
    }
    let k = k.min(dim);
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(dim, k);
    for (c, &i) in order[..k].iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    Ok(Eigenpairs { values, vectors })
}

/// Default hard cap on `n_max` for the doubling study.
pub const DEFAULT_N_MAX_CAP: usize = 2048;

/// Converged exact levels together with the truncation that produced them.
#[derive(Debug, Clone)]
pub struct ConvergedSpectrum {
    pub levels: LevelSet,
    pub n_max: usize,
    /// Largest level shift between the last two truncations.
    pub shift: f64,
}

/// First truncation tried by [`converged_spectrum`].
pub fn start_n_max(params: &ModelParams, k: usize) -> usize {
    let r = params.g / params.omega;
    let heuristic = (8.0 * r * r + 4.0 * r + k as f64).ceil() as usize;
    heuristic.max(40)
}

pub fn converged_spectrum(params: &ModelParams, k: usize, tol: f64) -> Result<ConvergedSpectrum> {
    converged_spectrum_with_cap(params, k, tol, DEFAULT_N_MAX_CAP)
}

/// Doubles `n_max` until the `k` lowest levels move by less than `tol`.
/// Returns the levels at the larger truncation of the accepted pair.
pub fn converged_spectrum_with_cap(
    params: &ModelParams,
    k: usize,
    tol: f64,
    cap: usize,
) -> Result<ConvergedSpectrum> {
    params.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol must be > 0, got {tol}")));
    }
    let mut n = start_n_max(params, k).max(k / 2 + 2);
    if n > cap {
        return Err(Error::TruncationNonConvergence { n_max: n, cap, shift: f64::INFINITY });
    }
    let solve = |n: usize| -> Result<Vec<f64>> {
        let h = build_hamiltonian(params, FockTruncation::new(n)?);
        Ok(exact_eigs(&h, k)?.values)
    };
    let mut prev = solve(n)?;
    let mut last_shift = f64::INFINITY;
    loop {
        let next_n = 2 * n;
        if next_n > cap {
            return Err(Error::TruncationNonConvergence { n_max: next_n, cap, shift: last_shift });
        }
        let next = solve(next_n)?;
        let shift = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        last_shift = shift;
        if shift < tol {
            let items =
                next.iter().enumerate().map(|(i, &e)| (LevelLabel::Exact(i), e)).collect();
            return Ok(ConvergedSpectrum {
                levels: LevelSet::from_unsorted(MethodTag::Exact, items, k),
                n_max: next_n,
                shift,
            });
        }
        prev = next;
        n = next_n;
    }
}

//! Second-order Van Vleck perturbation theory in the tunneling element.
//!
//! At `Delta = 0` the polaron-displaced states `|dn, j>~` and `|up, j + l>~`
//! are degenerate when `eps = l Omega`. The tunneling term is treated as a
//! perturbation: inside each such doublet it is kept exactly (a 2x2 block),
//! couplings to all other displaced states enter at second order through the
//! diagonal corrections `eps2` and through the generator `A = iS` of the
//! Van Vleck transformation.
//!
//! Generator conventions used throughout: `H_eff = e^{A} H e^{-A}`, `A` real
//! antisymmetric, eigenstates `|Phi> = e^{-A} |Phi0>` expanded to second order
//! as `(1 - A1 - A2 + A1^2 / 2) |Phi0>`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    basis_index, Branch, FockTruncation, LevelLabel, LevelSet, MethodTag, ModelParams, Spin,
    StateVector,
};
use crate::specfun::{dressed_delta, ein_neg, xi};

/// Tail tolerance (in units of Omega) for every semi-infinite k-sum.
pub const SUM_TAIL_TOL: f64 = 1e-12;
/// Hard cap on the number of k-terms in any semi-infinite sum.
pub const SUM_TERM_CAP: usize = 4096;
/// Displaced states whose bare-basis tail norm exceeds this are rejected.
pub const TAIL_NORM_TOL: f64 = 1e-10;

/// Identifies the quasidegenerate subspace `(dn, j), (up, j + l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DoubletIndex {
    pub j: usize,
    pub l: i64,
}

impl DoubletIndex {
    pub fn new(j: usize, l: i64) -> Result<Self> {
        if l < 0 && (j as i64) < -l {
            return Err(Error::InvalidParams(format!(
                "doublet j = {j} has no spin-up partner for l = {l}"
            )));
        }
        Ok(Self { j, l })
    }

    /// Fock index of the spin-up member.
    pub fn up_index(&self) -> usize {
        (self.j as i64 + self.l) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubletSolution {
    pub index: DoubletIndex,
    /// `eps2_{dn, j}`
    pub eps2_down: f64,
    /// `eps2_{up, j + l}`
    pub eps2_up: f64,
    /// Dressed intra-doublet tunneling element `Delta_j^{j+l}`.
    pub coupling: f64,
    /// Dressed oscillation frequency `Omega_j^l`.
    pub omega_jl: f64,
    /// Mixing angle in `(0, pi]` (`0` only when the coupling vanishes with a
    /// positive detuning).
    pub theta: f64,
    /// `(E_-, E_+)`
    pub energies: (f64, f64),
}

/// Resonance index `round(eps / Omega)`, half-integers rounded away from zero.
pub fn choose_l(params: &ModelParams) -> i64 {
    (params.eps / params.omega).round() as i64
}

fn excluded_k(spin: Spin, l: i64) -> i64 {
    match spin {
        Spin::Down => l,
        Spin::Up => -l,
    }
}

/// `eps -/+ k Omega` for spin down/up.
fn eps2_denominator(spin: Spin, k: i64, params: &ModelParams) -> f64 {
    params.eps + spin.sigma() * k as f64 * params.omega
}

fn is_vanishing(den: f64, params: &ModelParams) -> bool {
    den.abs() <= 1e-12 * params.omega
}

fn first_cut(alpha: f64) -> usize {
    16 + (2.0 * alpha).ceil() as usize
}

/// Sums `term(k)` for `k = start, start + 1, ...` with a doubling schedule
/// until the absolute contribution of the last doubling falls below
/// `SUM_TAIL_TOL * omega`.
fn adaptive_sum(
    start: i64,
    alpha: f64,
    omega: f64,
    mut term: impl FnMut(i64) -> Result<f64>,
) -> Result<f64> {
    let mut cut = first_cut(alpha);
    let mut sum = 0.0;
    let mut k = start;
    let mut end = start + cut as i64;
    let mut first = true;
    loop {
        let mut chunk_abs = 0.0;
        while k <= end {
            let t = term(k)?;
            sum += t;
            chunk_abs += t.abs();
            k += 1;
        }
        if !first && chunk_abs < SUM_TAIL_TOL * omega {
            return Ok(sum);
        }
        first = false;
        if cut >= SUM_TERM_CAP {
            return Err(Error::SeriesNonConvergence { cap: SUM_TERM_CAP });
        }
        cut *= 2;
        end = start + cut as i64;
    }
}

/// Diagonal second-order correction
/// `eps2_{dn/up, j} = sum_{k >= -j, k != +/-l} (Delta_j^{j+k})^2 / (eps -/+ k Omega)`.
pub fn epsilon2(spin: Spin, j: usize, params: &ModelParams, l: i64) -> Result<f64> {
    let alpha = params.alpha();
    adaptive_sum(-(j as i64), alpha, params.omega, |k| eps2_term(spin, j, k, params, l, alpha))
}

/// Same sum, truncated at `k <= k_cut`.
pub fn epsilon2_truncated(
    spin: Spin,
    j: usize,
    params: &ModelParams,
    l: i64,
    k_cut: i64,
) -> Result<f64> {
    let alpha = params.alpha();
    let mut sum = 0.0;
    for k in -(j as i64)..=k_cut {
        sum += eps2_term(spin, j, k, params, l, alpha)?;
    }
    Ok(sum)
}

fn eps2_term(spin: Spin, j: usize, k: i64, params: &ModelParams, l: i64, alpha: f64) -> Result<f64> {
    if k == excluded_k(spin, l) {
        return Ok(0.0);
    }
    let den = eps2_denominator(spin, k, params);
    if is_vanishing(den, params) {
        return Err(Error::DegenerateDenominator { spin, j, k, l });
    }
    let d = dressed_delta(j, (j as i64 + k) as usize, params.delta, alpha);
    Ok(d * d / den)
}

/// Solves the 2x2 effective block for given diagonal corrections. Shared by
/// the second-order theory and the adiabatic approximation (zero corrections).
pub(crate) fn assemble_doublet(
    params: &ModelParams,
    index: DoubletIndex,
    eps2_down: f64,
    eps2_up: f64,
) -> DoubletSolution {
    let DoubletIndex { j, l } = index;
    let coupling = dressed_delta(j, index.up_index(), params.delta, params.alpha());
    let detuning = params.eps - l as f64 * params.omega + 0.25 * (eps2_down + eps2_up);
    let omega_jl = detuning.hypot(coupling);
    let theta = if detuning == 0.0 { std::f64::consts::FRAC_PI_2 } else { coupling.abs().atan2(detuning) };
    let center = (j as f64 + 0.5 * l as f64) * params.omega - params.g * params.g / params.omega
        + 0.125 * (eps2_down - eps2_up);
    DoubletSolution {
        index,
        eps2_down,
        eps2_up,
        coupling,
        omega_jl,
        theta,
        energies: (center - 0.5 * omega_jl, center + 0.5 * omega_jl),
    }
}

/// Second-order doublet: corrections, dressed frequency, mixing angle, energies.
pub fn doublet_solution(params: &ModelParams, j: usize, l: i64) -> Result<DoubletSolution> {
    let index = DoubletIndex::new(j, l)?;
    let down = epsilon2(Spin::Down, j, params, l)?;
    let up = epsilon2(Spin::Up, index.up_index(), params, l)?;
    Ok(assemble_doublet(params, index, down, up))
}

/// Spins and indices of the displaced states without a degenerate partner.
pub fn unpaired_states(l: i64) -> Vec<(Spin, usize)> {
    if l > 0 {
        (0..l as usize).map(|j| (Spin::Up, j)).collect()
    } else {
        (0..(-l) as usize).map(|j| (Spin::Down, j)).collect()
    }
}

/// `E0 -/+ eps2 / 4` for an unpaired spin-up/down state.
pub fn unpaired_energy(params: &ModelParams, spin: Spin, j: usize, l: i64) -> Result<f64> {
    let e2 = epsilon2(spin, j, params, l)?;
    Ok(params.bare_energy(spin, j) - 0.25 * spin.sigma() * e2)
}

/// Number of doublets to evaluate so the lowest `k` levels are all present.
pub(crate) fn doublet_count(params: &ModelParams, k: usize) -> usize {
    k + (params.delta / params.omega).ceil() as usize + 4
}

pub(crate) fn first_doublet(l: i64) -> usize {
    if l < 0 {
        (-l) as usize
    } else {
        0
    }
}

pub fn vvp_levels(params: &ModelParams, k: usize) -> Result<LevelSet> {
    vvp_levels_with_l(params, k, choose_l(params))
}

pub fn vvp_levels_with_l(params: &ModelParams, k: usize, l: i64) -> Result<LevelSet> {
    params.validate()?;
    let mut items = Vec::new();
    let j0 = first_doublet(l);
    for j in j0..j0 + doublet_count(params, k) {
        let d = doublet_solution(params, j, l)?;
        items.push((LevelLabel::Doublet { branch: Branch::Minus, j, l }, d.energies.0));
        items.push((LevelLabel::Doublet { branch: Branch::Plus, j, l }, d.energies.1));
    }
    for (spin, j) in unpaired_states(l) {
        items.push((LevelLabel::Unpaired { spin, j }, unpaired_energy(params, spin, j, l)?));
    }
    Ok(LevelSet::from_unsorted(MethodTag::Vvp, items, k))
}

/// Closed-form zero-bias doublet `j = 0` energies `(E_-, E_+)` through `Ein`.
pub fn zero_bias_ground_doublet(params: &ModelParams) -> (f64, f64) {
    let a = params.alpha();
    let shift = params.delta * params.delta * (-a).exp() / (4.0 * params.omega) * ein_neg(a);
    let half = 0.5 * (params.delta * (-a / 2.0).exp()).abs();
    let base = -params.g * params.g / params.omega + shift;
    (base - half, base + half)
}

/// Closed-form zero-bias doublet `j = 1` energies. The printed incomplete-Gamma
/// combination reduces to `(a-1)^2 Ein(-a) + 1 - a^2 + (a-1) e^a`.
pub fn zero_bias_first_doublet(params: &ModelParams) -> (f64, f64) {
    let a = params.alpha();
    let bracket = (a - 1.0).powi(2) * ein_neg(a) + 1.0 - a * a + (a - 1.0) * a.exp();
    let shift = params.delta * params.delta * (-a).exp() / (4.0 * params.omega) * bracket;
    let half = 0.5 * (params.delta * (1.0 - a) * (-a / 2.0).exp()).abs();
    let base = params.omega - params.g * params.g / params.omega + shift;
    (base - half, base + half)
}

/// Polaron-displaced Fock state `|spin, j>~` in the bare basis, normalized.
///
/// Expansion coefficients are `Xi(alpha/4)` with the spin-dependent sign of
/// the displacement; `alpha / 4 = (g/Omega)^2`.
pub fn displaced_state(
    spin: Spin,
    j: usize,
    params: &ModelParams,
    trunc: FockTruncation,
) -> Result<StateVector> {
    let quarter = params.alpha() / 4.0;
    let mut state = StateVector::zeros(trunc);
    let mut norm2 = 0.0;
    for jp in 0..trunc.n_max {
        let c = displacement_coefficient(spin, j, jp, quarter);
        state.coefficients[basis_index(spin, jp)] = c;
        norm2 += c * c;
    }
    let tail = (1.0 - norm2).max(0.0);
    if tail > TAIL_NORM_TOL {
        return Err(Error::TruncationTail { tail, n_max: trunc.n_max });
    }
    let inv = 1.0 / norm2.sqrt();
    state.coefficients.iter_mut().for_each(|c| *c *= inv);
    Ok(state)
}

fn displacement_coefficient(spin: Spin, j: usize, jp: usize, quarter_alpha: f64) -> f64 {
    match spin {
        Spin::Up => dressed_delta(jp, j, 1.0, quarter_alpha),
        Spin::Down => dressed_delta(j, jp, 1.0, quarter_alpha),
    }
}

/// Order of a Van Vleck generator element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// `<bra| iS^(order) |ket>` between displaced states `(spin, j)`.
///
/// First order couples opposite spins and vanishes inside a doublet;
/// second order couples equal spins with `j != j'`.
pub fn s_matrix_element(
    order: Order,
    bra: (Spin, usize),
    ket: (Spin, usize),
    params: &ModelParams,
    l: i64,
) -> Result<f64> {
    match order {
        Order::First => {
            if bra.0 == ket.0 {
                return Err(Error::InvalidParams("first-order element needs opposite spins".into()));
            }
            first_order_element(bra, ket, params, l, params.alpha())
        }
        Order::Second => {
            if bra.0 != ket.0 || bra.1 == ket.1 {
                return Err(Error::InvalidParams(
                    "second-order element needs equal spins and j != j'".into(),
                ));
            }
            second_order_element(bra.0, bra.1, ket.1, params, l, |a, b| {
                Ok(dressed_delta(a, b, params.delta, params.alpha()))
            })
        }
    }
}

fn first_order_element(
    bra: (Spin, usize),
    ket: (Spin, usize),
    params: &ModelParams,
    l: i64,
    alpha: f64,
) -> Result<f64> {
    let (j, jp) = (bra.1 as i64, ket.1 as i64);
    let k = jp - j;
    match bra.0 {
        Spin::Down => {
            if jp == j + l {
                return Ok(0.0);
            }
            let den = params.eps - k as f64 * params.omega;
            if is_vanishing(den, params) {
                return Err(Error::DegenerateDenominator { spin: Spin::Down, j: bra.1, k, l });
            }
            Ok(-0.5 * dressed_delta(bra.1, ket.1, params.delta, alpha) / den)
        }
        Spin::Up => {
            if jp == j - l {
                return Ok(0.0);
            }
            let den = params.eps + k as f64 * params.omega;
            if is_vanishing(den, params) {
                return Err(Error::DegenerateDenominator { spin: Spin::Up, j: bra.1, k, l });
            }
            Ok(0.5 * dressed_delta(ket.1, bra.1, params.delta, alpha) / den)
        }
    }
}

/// Second-order element with a pluggable source for `Delta_a^b` so the same
/// formula serves both the element API and the tabulated generator.
fn second_order_element(
    spin: Spin,
    j: usize,
    jp: usize,
    params: &ModelParams,
    l: i64,
    delta_ab: impl Fn(usize, usize) -> Result<f64>,
) -> Result<f64> {
    let omega = params.omega;
    // up-up sums over intermediate spin-down states k with energies measured
    // by eps + (k - j) Omega; down-down mirrors this with eps -> -eps, l -> -l
    let (s, shift) = match spin {
        Spin::Up => (1.0, -l),
        Spin::Down => (-1.0, l),
    };
    let (ji, jpi) = (j as i64, jp as i64);
    let special = [ji + shift, jpi + shift];
    // Delta between the spin-`spin` state `a` and the opposite-spin state `k`
    let elem = |a: usize, k: usize| -> Result<f64> {
        match spin {
            Spin::Up => delta_ab(k, a),
            Spin::Down => delta_ab(a, k),
        }
    };
    let den = |k: i64, a: i64| -> Result<f64> {
        let d = s * params.eps + (k - a) as f64 * omega;
        if is_vanishing(d, params) {
            Err(Error::DegenerateDenominator { spin, j, k, l })
        } else {
            Ok(d)
        }
    };
    let alpha = params.alpha();
    let generic = adaptive_sum(0, alpha + 2.0 * jp.max(j) as f64, omega, |k| {
        if special.contains(&k) {
            return Ok(0.0);
        }
        let ku = k as usize;
        let num = 0.5 * elem(j, ku)? * elem(jp, ku)?;
        if num == 0.0 {
            return Ok(0.0);
        }
        Ok(num * (1.0 / den(k, ji)? + 1.0 / den(k, jpi)?))
    })?;
    let mut total = generic;
    // resonant partners of ket and bra enter with full weight
    let kp = jpi + shift;
    if kp >= 0 {
        let ku = kp as usize;
        total += elem(j, ku)? * elem(jp, ku)? / den(kp, ji)?;
    }
    let kb = ji + shift;
    if kb >= 0 {
        let ku = kb as usize;
        total += elem(j, ku)? * elem(jp, ku)? / den(kb, jpi)?;
    }
    Ok(total / (4.0 * (jpi - ji) as f64 * omega))
}

/// Which eigenstate of the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Doublet(Branch),
    Unpaired(Spin),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VvpState {
    pub kind: StateKind,
    pub index: DoubletIndex,
    pub order0: StateVector,
    pub order1: StateVector,
    pub order2: StateVector,
}

impl VvpState {
    pub fn total(&self) -> StateVector {
        let mut s = self.order0.clone();
        s.axpy(1.0, &self.order1);
        s.axpy(1.0, &self.order2);
        s
    }
}

/// Polaron-displaced Fock states `j < n_disp` of both spins, expanded in
/// the bare truncation. `n_disp` is the largest cutoff at which every member
/// passes the tail-norm check.
pub struct DisplacedBasis {
    l: i64,
    trunc: FockTruncation,
    n_disp: usize,
    /// Columns are displaced states, column `basis_index(spin, j)`.
    matrix: DMatrix<f64>,
}

impl DisplacedBasis {
    pub fn new(params: &ModelParams, l: i64, trunc: FockTruncation) -> Result<Self> {
        params.validate()?;
        let n_disp = displaced_cutoff(params, trunc);
        if n_disp < 2 {
            return Err(Error::TruncationTail { tail: 1.0, n_max: trunc.n_max });
        }
        let mut matrix = DMatrix::zeros(trunc.dim(), 2 * n_disp);
        for j in 0..n_disp {
            for spin in [Spin::Down, Spin::Up] {
                let v = displaced_state(spin, j, params, trunc)?;
                matrix.set_column(basis_index(spin, j), &v.to_dvector());
            }
        }
        Ok(Self { l, trunc, n_disp, matrix })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    /// Number of displaced Fock levels kept per spin.
    pub fn n_disp(&self) -> usize {
        self.n_disp
    }

    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    /// Bare-basis coefficients, one column per displaced state.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Doublets whose both members lie inside the displaced cutoff.
    pub fn doublet_range(&self) -> std::ops::Range<usize> {
        let j0 = first_doublet(self.l);
        let end = (self.n_disp as i64 - self.l.max(0)).max(j0 as i64) as usize;
        j0..end
    }

    /// Zeroth-order state in displaced coordinates.
    pub fn order0_coordinates(
        &self,
        kind: StateKind,
        sol: Option<&DoubletSolution>,
        j: usize,
    ) -> DVector<f64> {
        let mut v = DVector::zeros(2 * self.n_disp);
        match (kind, sol) {
            (StateKind::Unpaired(spin), _) => v[basis_index(spin, j)] = 1.0,
            (StateKind::Doublet(branch), Some(sol)) => {
                let (s, c) = (0.5 * sol.theta).sin_cos();
                let sgn = if sol.coupling < 0.0 { -1.0 } else { 1.0 };
                let d = basis_index(Spin::Down, j);
                let u = basis_index(Spin::Up, sol.index.up_index());
                match branch {
                    Branch::Minus => {
                        v[d] = -s;
                        v[u] = -sgn * c;
                    }
                    Branch::Plus => {
                        v[d] = c;
                        v[u] = -sgn * s;
                    }
                }
            }
            (StateKind::Doublet(_), None) => unreachable!("doublet state without solution"),
        }
        v
    }

    pub fn to_bare(&self, v: &DVector<f64>) -> StateVector {
        let bare = &self.matrix * v;
        StateVector { coefficients: bare.iter().copied().collect() }
    }
}

/// First- and second-order Van Vleck generators over a displaced basis.
pub struct Generator {
    basis: DisplacedBasis,
    a1: DMatrix<f64>,
    a2: DMatrix<f64>,
}

impl Generator {
    pub fn new(params: &ModelParams, l: i64, trunc: FockTruncation) -> Result<Self> {
        Self::from_basis(params, DisplacedBasis::new(params, l, trunc)?)
    }

    pub fn from_basis(params: &ModelParams, basis: DisplacedBasis) -> Result<Self> {
        let (l, n_disp) = (basis.l, basis.n_disp);
        let dim = 2 * n_disp;
        let alpha = params.alpha();
        let table = DeltaTable::new(params, n_disp + table_margin(alpha));
        let mut a1 = DMatrix::zeros(dim, dim);
        for j in 0..n_disp {
            for jp in 0..n_disp {
                let v = first_order_element((Spin::Down, j), (Spin::Up, jp), params, l, alpha)?;
                let (d, u) = (basis_index(Spin::Down, j), basis_index(Spin::Up, jp));
                a1[(d, u)] = v;
                a1[(u, d)] = -v;
            }
        }
        let mut a2 = DMatrix::zeros(dim, dim);
        for spin in [Spin::Down, Spin::Up] {
            for j in 0..n_disp {
                for jp in (j + 1)..n_disp {
                    let v = second_order_element(spin, j, jp, params, l, |a, b| table.get(a, b))?;
                    let (r, c) = (basis_index(spin, j), basis_index(spin, jp));
                    a2[(r, c)] = v;
                    a2[(c, r)] = -v;
                }
            }
        }
        Ok(Self { basis, a1, a2 })
    }

    pub fn basis(&self) -> &DisplacedBasis {
        &self.basis
    }

    /// First-order generator in the displaced basis (antisymmetric).
    pub fn first_order(&self) -> &DMatrix<f64> {
        &self.a1
    }

    /// Second-order generator in the displaced basis (antisymmetric).
    pub fn second_order(&self) -> &DMatrix<f64> {
        &self.a2
    }

    /// `1 - A1 - A2 + A1^2 / 2`, mapping zeroth-order displaced coordinates
    /// to second-order eigenstates.
    pub fn transform(&self) -> DMatrix<f64> {
        let n = self.a1.nrows();
        DMatrix::identity(n, n) - &self.a1 - &self.a2 + (&self.a1 * &self.a1) * 0.5
    }

    /// Assembles `Phi0`, `-A1 Phi0` and `(-A2 + A1^2/2) Phi0` in the bare basis.
    pub fn state(&self, kind: StateKind, sol: Option<&DoubletSolution>, j: usize) -> VvpState {
        let phi0 = self.basis.order0_coordinates(kind, sol, j);
        let a1phi = &self.a1 * &phi0;
        let phi1 = -&a1phi;
        let phi2 = (&self.a1 * &a1phi) * 0.5 - &self.a2 * &phi0;
        let index = match sol {
            Some(s) => s.index,
            None => DoubletIndex { j, l: self.basis.l },
        };
        VvpState {
            kind,
            index,
            order0: self.basis.to_bare(&phi0),
            order1: self.basis.to_bare(&phi1),
            order2: self.basis.to_bare(&phi2),
        }
    }
}

fn table_margin(alpha: f64) -> usize {
    40 + (alpha + 10.0 * alpha.sqrt()).ceil() as usize
}

/// Largest `N` such that every displaced state with `j < N` has bare-basis
/// tail norm below `TAIL_NORM_TOL`.
pub fn displaced_cutoff(params: &ModelParams, trunc: FockTruncation) -> usize {
    let quarter = params.alpha() / 4.0;
    for j in 0..trunc.n_max {
        let norm2: f64 = (0..trunc.n_max)
            .map(|jp| displacement_coefficient(Spin::Up, j, jp, quarter).powi(2))
            .sum();
        if 1.0 - norm2 > TAIL_NORM_TOL {
            return j;
        }
    }
    trunc.n_max
}

/// `Delta_a^b` for `a, b < size`; zero beyond (those elements are below the
/// sum tolerance by construction of the margin).
struct DeltaTable {
    size: usize,
    values: Vec<f64>,
}

impl DeltaTable {
    fn new(params: &ModelParams, size: usize) -> Self {
        let alpha = params.alpha();
        let mut values = vec![0.0; size * size];
        for a in 0..size {
            for b in a..size {
                let v = params.delta * xi(b - a, a, alpha);
                values[a * size + b] = v;
                values[b * size + a] = if (b - a) % 2 == 1 { -v } else { v };
            }
        }
        Self { size, values }
    }

    fn get(&self, a: usize, b: usize) -> Result<f64> {
        if a >= self.size || b >= self.size {
            return Ok(0.0);
        }
        Ok(self.values[a * self.size + b])
    }
}

/// Second-order eigenstate for a doublet member or an unpaired level.
pub fn vvp_state(
    params: &ModelParams,
    kind: StateKind,
    j: usize,
    l: i64,
    trunc: FockTruncation,
) -> Result<VvpState> {
    if params.delta == 0.0 {
        return Err(Error::InvalidParams(
            "state construction needs delta > 0 (mixing angle undefined)".into(),
        ));
    }
    let generator = Generator::new(params, l, trunc)?;
    match kind {
        StateKind::Doublet(_) => {
            let sol = doublet_solution(params, j, l)?;
            if !generator.basis().doublet_range().contains(&j) {
                return Err(Error::TruncationTail { tail: f64::NAN, n_max: trunc.n_max });
            }
            Ok(generator.state(kind, Some(&sol), j))
        }
        StateKind::Unpaired(spin) => {
            if !unpaired_states(l).contains(&(spin, j)) {
                return Err(Error::InvalidParams(format!(
                    "({spin:?}, {j}) is not unpaired for l = {l}"
                )));
            }
            Ok(generator.state(kind, None, j))
        }
    }
}

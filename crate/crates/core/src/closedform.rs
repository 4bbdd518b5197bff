//! Closed-form comparator spectra: Jaynes-Cummings, the adiabatic
//! approximation (extended to finite bias) and the generalized rotating-wave
//! approximation. JCM and GRWA exist only for the unbiased qubit.

use crate::error::{Error, Result};
use crate::model::{Branch, LevelLabel, LevelSet, MethodTag, ModelParams};
use crate::specfun::{laguerre_unchecked, xi};
use crate::vvp::{assemble_doublet, first_doublet, unpaired_states, DoubletIndex};

fn require_zero_bias(params: &ModelParams, method: &'static str) -> Result<()> {
    if params.eps != 0.0 {
        return Err(Error::UnsupportedRegime {
            method,
            reason: format!("defined only for eps = 0, got eps = {}", params.eps),
        });
    }
    Ok(())
}

/// Jaynes-Cummings ladder: `-Delta/2` and the pairs
/// `(j + 1/2) Omega -/+ sqrt((Delta - Omega)^2 + 4 (j+1) g^2) / 2`.
pub fn jcm_levels(params: &ModelParams, k: usize) -> Result<LevelSet> {
    params.validate()?;
    require_zero_bias(params, "jcm")?;
    let mut items = vec![(LevelLabel::Jcm(0), -0.5 * params.delta)];
    let detuning = params.delta - params.omega;
    for j in 0..k.div_ceil(2) + 1 {
        let center = (j as f64 + 0.5) * params.omega;
        let half = 0.5 * (detuning * detuning + 4.0 * (j + 1) as f64 * params.g * params.g).sqrt();
        items.push((LevelLabel::Jcm(2 * j + 1), center - half));
        items.push((LevelLabel::Jcm(2 * j + 2), center + half));
    }
    Ok(LevelSet::from_unsorted(MethodTag::Jcm, items, k))
}

/// Doublets `j = first ..= j_max` of the adiabatic approximation at
/// resonance index `l`, plus the unpaired levels. All levels are returned.
///
/// Uses the same doublet solver as the second-order theory with both
/// diagonal corrections set to zero.
pub fn adiabatic_levels(params: &ModelParams, l: i64, j_max: usize) -> Result<LevelSet> {
    params.validate()?;
    let mut items = Vec::new();
    for j in first_doublet(l)..=j_max {
        let d = assemble_doublet(params, DoubletIndex { j, l }, 0.0, 0.0);
        items.push((LevelLabel::Doublet { branch: Branch::Minus, j, l }, d.energies.0));
        items.push((LevelLabel::Doublet { branch: Branch::Plus, j, l }, d.energies.1));
    }
    for (spin, j) in unpaired_states(l) {
        items.push((LevelLabel::Unpaired { spin, j }, params.bare_energy(spin, j)));
    }
    let n = items.len();
    Ok(LevelSet::from_unsorted(MethodTag::Adiabatic, items, n))
}

/// GRWA ladder: the adiabatic ground level and RWA pairs built from
/// `E_{+,j}` and `E_{-,j+1}` for `j = 0 ..= j_max`. All levels are returned.
pub fn grwa_levels(params: &ModelParams, j_max: usize) -> Result<LevelSet> {
    params.validate()?;
    require_zero_bias(params, "grwa")?;
    let a = params.alpha();
    let (w, d) = (params.omega, params.delta);
    let damp = (-a / 2.0).exp();
    let polaron = params.g * params.g / w;
    let mut items = vec![(LevelLabel::GrwaGround, -polaron - 0.5 * d * damp)];
    for j in 0..=j_max {
        let lj = laguerre_unchecked(j, 0, a).abs();
        let lj1 = laguerre_unchecked(j + 1, 0, a).abs();
        let center = (j as f64 + 0.5) * w - polaron + 0.25 * d * damp * (lj - lj1);
        let diag = 0.5 * w - 0.25 * d * damp * (lj + lj1);
        // (alpha/(j+1)) e^{-alpha} [L_j^1]^2 is the squared dressing factor
        let cross = 0.5 * d * xi(1, j, a);
        let half = diag.hypot(cross);
        items.push((LevelLabel::GrwaPair { branch: Branch::Minus, j }, center - half));
        items.push((LevelLabel::GrwaPair { branch: Branch::Plus, j }, center + half));
    }
    let n = items.len();
    Ok(LevelSet::from_unsorted(MethodTag::Grwa, items, n))
}

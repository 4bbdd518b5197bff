//! Spectrum and qubit dynamics of a biased qubit coupled to a single
//! oscillator mode at arbitrary coupling strength.
//!
//! The exact truncated diagonalization in [`model`] serves as the reference
//! for every approximate solver: the closed-form ladders in [`closedform`]
//! and second-order Van Vleck perturbation theory in the tunneling element
//! in [`vvp`]. [`dynamics`] propagates the qubit population difference from
//! any of these spectra, and [`validate`] maps where each approximation holds.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod dynamics;
mod error;
pub mod model;
pub mod specfun;
pub mod validate;
pub mod vvp;

pub use closedform::{adiabatic_levels, grwa_levels, jcm_levels};
pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, converged_spectrum, exact_eigs, Branch, FockTruncation, Level, LevelLabel,
    LevelSet, MethodTag, ModelParams, Spin, StateVector,
};
pub use vvp::{choose_l, doublet_solution, vvp_levels, vvp_state};

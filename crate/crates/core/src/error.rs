use thiserror::Error;

use crate::model::Spin;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("symmetric eigensolver did not converge within {iterations} iterations")]
    EigenNonConvergence { iterations: usize },

    #[error(
        "spectrum not converged: n_max {n_max} exceeds cap {cap} (last level shift {shift:e})"
    )]
    TruncationNonConvergence { n_max: usize, cap: usize, shift: f64 },

    #[error("{method} is not supported here: {reason}")]
    UnsupportedRegime { method: &'static str, reason: String },

    #[error(
        "vanishing denominator at k = {k} for spin {spin:?}, j = {j}: resonance index l = {l} is inconsistent with eps"
    )]
    DegenerateDenominator { spin: Spin, j: usize, k: i64, l: i64 },

    #[error("truncation too small: displaced state tail norm {tail:e} at n_max = {n_max}")]
    TruncationTail { tail: f64, n_max: usize },

    #[error("series did not reach tail tolerance within {cap} terms")]
    SeriesNonConvergence { cap: usize },

    #[error("time grid is not uniform")]
    NonUniformGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

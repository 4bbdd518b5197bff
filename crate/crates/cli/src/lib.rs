//! Batch driver behind the `rabi` binary: resolves flags, config files and
//! environment overrides, runs one command and emits CSV or JSON.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Outcome};
pub use config::{resolve, Cli, CommandKind, Flags, Format, RunConfig, UsageError};
pub use output::{Cell, Table};

/// Process exit status for a failed run: 2 for usage errors and unsupported
/// method/parameter combinations, 3 for numerical failures.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        3
    }
}

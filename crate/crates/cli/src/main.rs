use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use rabi_cli::{exit_code, resolve, run, Cli};

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rabi: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let (kind, flags) = Cli::parse().command.split();
    let cfg = resolve(kind, flags, |k| std::env::var(k).ok())?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let outcome = run(kind, &cfg)?;
    let to_file = matches!(kind, rabi_cli::CommandKind::Spectrum | rabi_cli::CommandKind::Dynamics | rabi_cli::CommandKind::Fourier);
    match (&cfg.out, to_file) {
        (Some(path), true) => {
            let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            outcome.table.write(cfg.format, &mut f)?;
        }
        _ => {
            let mut out = io::stdout().lock();
            outcome.table.write(cfg.format, &mut out)?;
            out.flush()?;
        }
    }
    if outcome.failed {
        let failed: Vec<String> = outcome
            .table
            .rows
            .iter()
            .filter(|r| r[1] == rabi_cli::Cell::from("false"))
            .map(|r| format!("{:?}", r[0]))
            .collect();
        eprintln!("rabi: failed checks: {}", failed.join(", "));
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

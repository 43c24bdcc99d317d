// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dissgate::config::{parse_config, RunConfig};
use dissgate::Error;

#[derive(Args)]
struct Paths {
    /// Configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Validate the configuration and print the plan without computing.
    #[arg(long)]
    dry_run: bool,
}

/// Failure with its exit status.
pub enum Failure {
    Config(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Budget { .. } | Error::InvalidParameter { .. } | Error::Truncation { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn load(path: &PathBuf) -> Result<RunConfig, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

#[derive(Parser)]
#[command(name = "dissgate", version, about = "Dissipative trapped-ion OR/NOR gate simulator")]
struct Invocation {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Dressed spectra and probe resonances of the low-lying input states.
    Dressed(Paths),
    /// Probe depletion and cooling time series.
    Scan(Paths),
    /// Truth table of the configured gate.
    TruthTable(Paths),
    /// Analytic, numeric and measured OR fidelities.
    ErrorTable(Paths),
    /// Final populations at increasing Fock cutoffs.
    Converge(Paths),
    /// Grid sweep of the truth-table objective.
    Sweep(Paths),
}

fn main() -> ExitCode {
    let inv = Invocation::parse();
    let (kind, paths) = match inv.command {
        Sub::Dressed(p) => (commands::Kind::Dressed, p),
        Sub::Scan(p) => (commands::Kind::Scan, p),
        Sub::TruthTable(p) => (commands::Kind::TruthTable, p),
        Sub::ErrorTable(p) => (commands::Kind::ErrorTable, p),
        Sub::Converge(p) => (commands::Kind::Converge, p),
        Sub::Sweep(p) => (commands::Kind::Sweep, p),
    };
    let result = load(&paths.config).and_then(|cfg| {
        let out = paths.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
        if paths.dry_run {
            commands::plan(kind, &cfg, &out)
        } else {
            commands::run(kind, &cfg, &out)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

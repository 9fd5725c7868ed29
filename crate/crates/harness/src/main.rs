use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optimist_core::bounds::{BoundId, EvalOptions, Intermediate};
use optimist_harness::config::{BoundSelection, ExperimentConfig, MonotoneConfig, RawConfig};
use optimist_harness::error::config;
use optimist_harness::{monotone_cmd, run, Result};

#[derive(Parser)]
#[command(name = "optimist", version, about = "Play seeded online-optimization games and check regret bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run a single seed instead of the configured list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// A bound passes when its margin is at least -tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Play every seed of a config and check the selected bounds.
    Run { config: PathBuf },
    /// Re-run a config for each value of one numeric key.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Re-evaluate bounds on a stored round log.
    Verify {
        log: PathBuf,
        /// Comma-separated bound ids; all applicable ones by default.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<String>,
        #[arg(long)]
        infinite_rho: bool,
        /// Build the S-I intermediate point from x-check.
        #[arg(long)]
        proof_intermediate: bool,
    },
    /// Loop residuals and Regret^n tables for a monotone operator.
    Monotone { config: PathBuf },
}

fn dispatch(cli: Cli) -> Result<usize> {
    match cli.command {
        Command::Run { config: path } => {
            let mut cfg = ExperimentConfig::load(&path)?;
            run::apply_overrides(&mut cfg, cli.seed, cli.tolerance);
            run::run(&cfg, &cli.out_dir)
        }
        Command::Sweep { config: path, axis, values } => {
            let raw = RawConfig::load(&path)?;
            // validate the base file before sweeping
            ExperimentConfig::from_raw(raw.clone())?;
            run::sweep(&raw, &axis, &values, cli.seed, cli.tolerance, &cli.out_dir)
        }
        Command::Verify { log, bounds, infinite_rho, proof_intermediate } => {
            let selection = if bounds.is_empty() {
                BoundSelection::All
            } else {
                BoundSelection::List(
                    bounds
                        .iter()
                        .map(|b| BoundId::parse(b).ok_or_else(|| config(format!("unknown bound `{b}`"))))
                        .collect::<Result<_>>()?,
                )
            };
            let opts = EvalOptions {
                infinite_rho,
                intermediate: if proof_intermediate { Intermediate::Proof } else { Intermediate::Statement },
            };
            run::verify(&log, &selection, opts, cli.tolerance.unwrap_or(1e-7))
        }
        Command::Monotone { config: path } => {
            let mut cfg = MonotoneConfig::load(&path)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(t) = cli.tolerance {
                cfg.tolerance = t;
            }
            monotone_cmd::monotone(&cfg, &cli.out_dir)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

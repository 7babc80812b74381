// `!(x > 0)` deliberately treats NaN as invalid.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qscatter::Quantity;

use crate::commands::Direction;
use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, CliResult};

/// Wavepacket scattering by the reflectionless sech² well.
///
/// Set QSCATTER_THREADS to cap the number of worker threads.
#[derive(Parser)]
#[command(name = "qscatter", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density snapshots, one CSV per time.
    Density,
    /// Position and momentum expectation values and position spread.
    Moments,
    /// Arrival-time distributions per detector and their mean times.
    Arrival,
    /// Bohmian quantile trajectories, initial velocities, path from the mean.
    Trajectories,
    /// Runs the invariant suite; exits 1 when any check fails.
    Validate {
        /// Skip the Crank-Nicolson comparisons.
        #[arg(long)]
        quick: bool,
    },
    /// Converts a value between physical and scaled units.
    Units {
        /// Particle mass in kg.
        #[arg(long, allow_hyphen_values = true)]
        mass: f64,
        /// Reduced Planck constant in J s.
        #[arg(long, default_value_t = 1.054_571_817e-34, allow_hyphen_values = true)]
        hbar: f64,
        /// One of x, p, k, j, v, rho, pi, t.
        #[arg(long)]
        quantity: Quantity,
        #[arg(long, allow_hyphen_values = true)]
        value: f64,
        #[arg(long, value_enum, default_value_t = Direction::ToScaled)]
        direction: Direction,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("QSCATTER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "QSCATTER_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    if let Command::Units {
        mass,
        hbar,
        quantity,
        value,
        direction,
    } = cli.command
    {
        let (phys, scaled) = commands::units(mass, hbar, quantity, value, direction)?;
        println!("quantity,physical,scaled");
        println!(
            "{quantity},{},{}",
            output::fmt_num(phys),
            output::fmt_num(scaled)
        );
        return Ok(());
    }
    let cfg = RunConfig::resolve(&cli.overrides)?;
    match cli.command {
        Command::Density => report(&commands::density(&cfg)?),
        Command::Moments => report(&commands::moments_cmd(&cfg)?),
        Command::Arrival => report(&commands::arrival(&cfg)?),
        Command::Trajectories => report(&commands::trajectories(&cfg)?),
        Command::Validate { quick } => report(&[commands::validate(&cfg, !quick)?]),
        Command::Units { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

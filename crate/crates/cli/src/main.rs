//! `soliton`: solve standing waves, check their identities, scan boosts and
//! evolve moving waves, writing CSV/JSON artifacts under `output_dir`.

// `!(x < y)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use soliton_core::SolitonError;

use crate::commands::Output;

#[derive(Parser)]
#[command(
    name = "soliton",
    version,
    about = "Solitary waves of nonlinear Klein-Gordon equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted field override such as `evolve.dt=0.005`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the standing-wave profile.
    Solve(Common),
    /// Compute functionals and the dilation and isotropy identities.
    Check(Common),
    /// Compare grid-measured energy and momentum of boosted waves with predictions.
    BoostScan(Common),
    /// Evolve a boosted wave and track its center of energy.
    Evolve(Common),
    /// Run solve, check, boost-scan and evolve in sequence.
    Demo(Common),
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "configuration error: {msg}"),
            Failure::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<SolitonError> for Failure {
    fn from(err: SolitonError) -> Self {
        match err {
            SolitonError::InvalidArgument(_)
            | SolitonError::ConditionViolated(_)
            | SolitonError::SuperluminalVelocity { .. } => Failure::Config(err.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SOLITON_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Config(format!(
            "SOLITON_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let (name, common) = match &cli.command {
        Command::Solve(c) => ("solve", c),
        Command::Check(c) => ("check", c),
        Command::BoostScan(c) => ("boost-scan", c),
        Command::Evolve(c) => ("evolve", c),
        Command::Demo(c) => ("demo", c),
    };
    let config = config::load(common.config.as_deref(), &common.overrides)?;
    let mut out = Output::new(&config.output_dir)?;
    let passed = match cli.command {
        Command::Solve(_) => commands::solve(&config, &mut out)?.1,
        Command::Check(_) => {
            let wave = commands::solve_wave(&config)?;
            commands::check(&config, &wave, &mut out)?.1
        }
        Command::BoostScan(_) => {
            let wave = commands::solve_wave(&config)?;
            commands::scan(&config, &wave, &mut out)?.1
        }
        Command::Evolve(_) => {
            let wave = commands::solve_wave(&config)?;
            commands::evolve(&config, &wave, &mut out)?
        }
        Command::Demo(_) => {
            let (wave, _) = commands::solve(&config, &mut out)?;
            let (_, checked) = commands::check(&config, &wave, &mut out)?;
            let (_, scanned) = commands::scan(&config, &wave, &mut out)?;
            let evolved = if wave.n <= 2 {
                commands::evolve(&config, &wave, &mut out)?
            } else {
                true
            };
            checked && scanned && evolved
        }
    };
    out.finish(name, &config)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks exceeded their tolerance");
            ExitCode::from(2)
        }
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

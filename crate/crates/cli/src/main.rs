//! `fraclyap`: Lyapunov-type bounds, Green's functions, Picard solutions and
//! spectral checks for `D^alpha u + f(t, u) = 0`, `u(a) = 0`, `D^beta u(b) = k`.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{GreensArgs, Outcome, SpectralArgs};
use config::CommonArgs;

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) | CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fraclyap",
    version,
    about = "Lyapunov-type inequalities for Riemann-Liouville boundary value problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check ∫q₊ against the Lyapunov bound (exit 0: only the trivial solution, 10: inconclusive)
    Bound(CommonArgs),
    /// Picard iteration for D^alpha u + f(t, u) = 0 (exit 11 if it does not converge)
    Solve(CommonArgs),
    /// Sample G(t, s) and report its extremal points
    Greens(GreensArgs),
    /// Spectral radius of u ↦ ∫ G(·, s) q(s) u(s) ds (exit 12 if power iteration does not converge)
    Spectral(SpectralArgs),
}

impl Command {
    fn run(&self) -> Result<Outcome, CliError> {
        match self {
            Command::Bound(c) => commands::bound(c),
            Command::Solve(c) => commands::solve(c),
            Command::Greens(g) => commands::greens(g),
            Command::Spectral(s) => commands::spectral(s),
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let outcome = cli.command.run()?;
    outcome.artifacts.emit(outcome.format, outcome.output.as_deref())?;
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRACLYAP_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

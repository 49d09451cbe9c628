use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triplewave_cli::{commands, CliError, Overrides, ScenarioConfig};

/// Green operators of the wave equation on a half-space, with the boundary
/// realization chosen by a boundary condition.
///
/// Exit codes: 0 success, 1 check failure, 2 usage or configuration error,
/// 3 I/O error.
#[derive(Parser)]
#[command(name = "triplewave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML, or a JSON sidecar written by a previous run).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides TRIPLEWAVE_OUT and the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replaces the tolerance of the checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of continuum quadrature nodes.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Continuum cutoff.
    #[arg(long, global = true)]
    xi_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan lambda < 0 for spectral points, alongside the FD eigenvalues.
    Spectrum,
    /// Sample the causal kernel G(t; x, y).
    Kernel,
    /// Apply a Green operator to the configured source.
    Evolve,
    /// Run verification checks ("all" or a list of names).
    Verify { checks: Vec<String> },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    Overrides {
        out: cli.out,
        tol: cli.tol,
        nodes: cli.nodes,
        xi_max: cli.xi_max,
    }
    .apply(&mut cfg);
    cfg.validate()?;
    let outcome = match &cli.command {
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Kernel => commands::kernel(&cfg)?,
        Command::Evolve => commands::evolve(&cfg)?,
        Command::Verify { checks } => commands::verify(&cfg, checks)?,
    };
    print!("{}", outcome.summary);
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("triplewave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

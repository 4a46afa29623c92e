mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gkdv::traveling_wave::Mode;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "GKDV_THREADS";

#[derive(Parser)]
#[command(name = "gkdv", version, about = "Surface waves on a fluid layer of arbitrary depth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file (unknown keys are rejected).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON output; without it results go to stdout only.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Coefficient recursion for solitary-wave construction.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the dispersion relation over a wavenumber range.
    Dispersion,
    /// Build a solitary wave, solve for its amplitude and check the steady residual.
    Soliton,
    /// Integrate the depth-resolved or weakly dispersive equation in time.
    Evolve,
    /// Run the acceptance checks.
    Verify {
        /// Print the checks without running them.
        #[arg(long)]
        list: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: gkdv::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(commands::EXIT_BAD_INPUT);
    }
    let ctx = commands::Context {
        config: cli.config,
        out: cli.out,
        mode: cli.mode,
    };
    let code = match cli.command {
        Command::Dispersion => commands::dispersion(&ctx),
        Command::Soliton => commands::soliton(&ctx),
        Command::Evolve => commands::evolve(&ctx),
        Command::Verify { list } => commands::verify(&ctx, list),
    };
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be a positive integer, got '{v}'"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

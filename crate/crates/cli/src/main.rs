//! `hswap`: runs, bounds, sweeps, relay chains and round optimisation for
//! the heralded-absorption swapping protocol.

mod commands;
mod config;
mod error;
mod format;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heralded_swap::Approach;

use crate::commands::Overrides;
use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "hswap",
    version,
    about = "Heralded-absorption entanglement swapping simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for the Monte-Carlo cross-check.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of trajectories; enables the Monte-Carlo columns of `run`.
    #[arg(long, global = true)]
    trajectories: Option<usize>,

    /// Overrides the `approach` key.
    #[arg(long, global = true, value_parser = parse_approach)]
    approach: Option<Approach>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-round success and fidelities of one configuration.
    Run,
    /// Analytic false-negative and false-positive bounds.
    Bounds,
    /// Grid over absorption and loss probabilities.
    Sweep,
    /// Success and fidelity of chains of identical hops.
    Chain,
    /// Best round count for the configured objective.
    Optimize,
}

fn parse_approach(s: &str) -> Result<Approach, String> {
    s.parse()
}

fn load_config(path: Option<&Path>) -> CliResult<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: path.to_path_buf(),
        source,
    })?;
    Config::parse(&text)
}

/// Writes via a temporary file in the target directory so that readers
/// never observe a partial table.
fn write_atomically(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |action, source| CliError::Io {
        action,
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err("create", e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| io_err("write", e))?;
    tmp.persist(path).map_err(|e| io_err("replace", e.error))?;
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<()> {
    let config = load_config(cli.config.as_deref())?;
    let overrides = Overrides {
        approach: cli.approach,
        seed: cli.seed,
        trajectories: cli.trajectories,
    };
    let output = match cli.command {
        Command::Run => commands::run(&config, &overrides)?,
        Command::Bounds => commands::bounds(&config, &overrides)?,
        Command::Sweep => commands::sweep_grid(&config, &overrides)?,
        Command::Chain => commands::chain(&config, &overrides)?,
        Command::Optimize => commands::optimize(&config, &overrides)?,
    };
    match &cli.out {
        Some(path) => write_atomically(path, &output),
        None => std::io::stdout()
            .write_all(output.as_bytes())
            .map_err(|source| CliError::Io {
                action: "write",
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: `solve`, `simulate`, `check` and `export`.

mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    check_config, cmd_check, cmd_export, cmd_simulate, cmd_solve, exit_code, export_slice,
    fmt_float, mean_and_stderr, simulate_manifest, solve_config, RolloutBatch, SliceSpec,
    EXIT_CHECK, EXIT_FAILURE, EXIT_OK, EXIT_USAGE,
};
pub use config::{CheckConfig, Mode, QuadratureConfig, RunConfig};
pub use manifest::{
    sha256_hex, FileEntry, LoadedManifest, Manifest, StageEntry, TableKind, MANIFEST_NAME,
};

#[derive(Debug, Parser)]
#[command(name = "symdp", version, about = "Finite-horizon stochastic DP with symmetry reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run backward induction and write value/policy tables with a manifest.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Roll out the stored policy from an initial state.
    Simulate {
        #[arg(long)]
        manifest: PathBuf,
        /// Comma-separated initial state; defaults to a per-system state.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        rollouts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV path; defaults to `rollouts.csv` next to the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify group axioms, system invariance and the moving frame.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a 1-D or 2-D slice of a stored table as CSV.
    Export {
        #[arg(long)]
        manifest: PathBuf,
        /// `stage=K,table=value|policy,aI=coord,...`
        #[arg(long, default_value = "")]
        slice: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses arguments (including the program name) and runs a subcommand,
/// returning the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Solve {
            config,
            out,
            workers,
        } => cmd_solve(&config, out.as_deref(), workers),
        Command::Simulate {
            manifest,
            x0,
            rollouts,
            seed,
            out,
        } => cmd_simulate(&manifest, x0.as_deref(), rollouts, seed, out.as_deref()),
        Command::Check { config } => cmd_check(&config),
        Command::Export {
            manifest,
            slice,
            out,
        } => cmd_export(&manifest, &slice, out.as_deref()),
    }
}

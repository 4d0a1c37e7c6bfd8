//! `pi-entangle`: batch front end for measures, PI parts and campaigns.
//!
//! Exit codes: 0 on success, 2 on validation errors (message on stderr,
//! prefixed `E_IO`, `E_SCHEMA` or `E_INVARIANT`), 3 when a verification
//! produced at least one FLAGGED record.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pi-entangle", version, about = "Entanglement of the permutationally invariant part")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PI_ENTANGLE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct Optimizer {
    /// Optimizer settings file (MeasureOptions JSON, see `defaults`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restarts for roof and REE minimization.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one measure on a state file.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// negativity, log_negativity, concurrence, eof, geometric, cren, log_cren, ree
        #[arg(long)]
        id: String,
        #[command(flatten)]
        optimizer: Optimizer,
        #[command(flatten)]
        output: Output,
    },
    /// PI part of a state, optionally after a local basis change.
    PiPart {
        #[arg(long)]
        state: PathBuf,
        /// Local basis file: {"u_a": {"re","im"}, "u_b": {"re","im"}}.
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare E(ρ) with the best E of the PI part over local bases.
    Verify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        id: String,
        /// Measure optimizer settings (MeasureOptions JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Basis-search restarts.
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification campaign from a config file.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `basis_restarts`.
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample or construct a state and write it as JSON.
    GenState {
        /// haar_pure, ginibre, werner, isotropic, bell_phi_plus, bell_psi_minus, max_mixed, product_00
        #[arg(long)]
        family: String,
        /// Family parameter (werner p, isotropic F).
        #[arg(long)]
        param: Option<f64>,
        /// Local dimensions, `2x2` or `3x3` style.
        #[arg(long, default_value = "2x2")]
        dims: String,
        /// Ginibre rank (default full).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every default setting.
    Defaults {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("E_SCHEMA: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("E_IO: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

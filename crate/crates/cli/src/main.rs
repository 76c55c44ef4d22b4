//! `pcx`: entanglement entropy and predictive complexity of single sites in a
//! two-magnon Heisenberg chain.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ChainArgs, DynamicsArgs, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pcx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-magnon sector spectrum as CSV, cross-checked against the other engine.
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Entropy and complexity time series of one site, with equilibrium statistics.
    Series {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
        /// Site j whose entropy and complexity are tracked.
        #[arg(long, default_value_t = 17)]
        site: usize,
    },
    /// Spacetime grids of every site as long-format CSV and PGM images.
    Scan {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
    },
    /// The two-qubit-by-qutrit worked example of the predictive map.
    SupplementA {
        /// Real coefficients a1..a6 of |Psi> = sum a_ij |i>_A |j>_B (row-major).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        /// Output directory; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {threads} threads: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(f())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { chain } => {
            let cfg = RunConfig::chain_only(&chain)?;
            with_threads(cfg.threads, || commands::spectrum(&cfg))?
        }
        Command::Series { chain, dynamics, site } => {
            let cfg = RunConfig::new(&chain, &dynamics, Some(site), &[1, 2, 3])?;
            with_threads(cfg.threads, || commands::series(&cfg))?
        }
        Command::Scan { chain, dynamics } => {
            let cfg = RunConfig::new(&chain, &dynamics, None, &[2])?;
            with_threads(cfg.threads, || commands::scan(&cfg))?
        }
        Command::SupplementA { coeffs, out } => commands::supplement_a(coeffs.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

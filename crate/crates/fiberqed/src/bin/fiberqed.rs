//! Command-line front end: thin argument parsing and dispatch into the
//! scenario layer. Results are CSV tables on stdout or at --out.

use clap::{Args, Parser, Subcommand};
use fiberqed::scenarios::{
    cmd_ddi, cmd_dynamics, cmd_figure, cmd_modes, cmd_rates, ModeCache, RunConfig,
};
use fiberqed::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fiberqed",
    version,
    about = "Nanofiber-mediated radiative coupling between two atoms: modes, rates, dipole-dipole coefficients, dynamics, and figure presets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (stdout when omitted). Relative paths are placed
    /// under $FIBERQED_OUT_DIR when that variable is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable the guided-eigenmode memo cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the guided eigenmode and tabulate its parameters and profile.
    Modes {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of radial profile samples (overrides the config).
        #[arg(long)]
        radial_samples: Option<usize>,
    },
    /// Decay-rate coefficients (guided/radiation, directional) over a sweep.
    Rates {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dipole-dipole interaction coefficients over a sweep.
    Ddi {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Master-equation dynamics: trajectory table, or photon-number summary
    /// when the config carries a sweep.
    Dynamics {
        #[command(flatten)]
        common: CommonArgs,
        /// Also compute the single-atom reference columns.
        #[arg(long)]
        baseline_single_atom: bool,
    },
    /// Run a built-in figure preset (fig2 .. fig30, optional a/b panel).
    Figure {
        /// Preset identifier, e.g. fig12 or fig4b.
        id: String,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable the guided-eigenmode memo cache.
        #[arg(long)]
        no_cache: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::State(_) | Error::UnknownFigure(_) | Error::TableParse(_) => 2,
        Error::Multimode { .. } | Error::NoGuidedRoot | Error::Domain(_) => 3,
        Error::Quadrature(_)
        | Error::MSumNotConverged { .. }
        | Error::EndpointSingularity { .. }
        | Error::SingularGeometry(_)
        | Error::PhaseUndefined => 4,
        Error::Integration { .. } => 5,
        Error::Io(_) => 6,
    }
}

fn resolve_out(path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path;
    }
    match std::env::var_os("FIBERQED_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path,
    }
}

fn emit(table: fiberqed::scenarios::ResultTable, out: Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => table.write_to(&resolve_out(path)),
        None => {
            print!("{}", table.emit());
            Ok(())
        }
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Modes {
            common,
            radial_samples,
        } => {
            let mut cfg = RunConfig::load(&common.config)?;
            if let Some(n) = radial_samples {
                cfg.numerics.radial_samples = n;
            }
            let cache = ModeCache::new(!common.no_cache);
            emit(cmd_modes(&cfg, &cache)?, common.out)
        }
        Command::Rates { common } => {
            let cfg = RunConfig::load(&common.config)?;
            let cache = ModeCache::new(!common.no_cache);
            emit(cmd_rates(&cfg, &cache)?, common.out)
        }
        Command::Ddi { common } => {
            let cfg = RunConfig::load(&common.config)?;
            let cache = ModeCache::new(!common.no_cache);
            emit(cmd_ddi(&cfg, &cache)?, common.out)
        }
        Command::Dynamics {
            common,
            baseline_single_atom,
        } => {
            let cfg = RunConfig::load(&common.config)?;
            let cache = ModeCache::new(!common.no_cache);
            emit(
                cmd_dynamics(&cfg, baseline_single_atom, &cache)?,
                common.out,
            )
        }
        Command::Figure { id, out, no_cache } => {
            let cache = ModeCache::new(!no_cache);
            emit(cmd_figure(&id, &cache)?, out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

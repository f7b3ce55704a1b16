//! Command-line driver: generate or load trips, build demand, solve,
//! evaluate, compare policies, sweep and export.

pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uamlanes_core::{Error, Policy};

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "uamlanes",
    version,
    about = "Directional lane allocation for UAM corridors"
)]
pub struct Cli {
    /// TOML run configuration; reference values when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true, env = "UAMLANES_SEED")]
    pub seed: Option<u64>,

    /// Overrides the configured output directory.
    #[arg(long, global = true, env = "UAMLANES_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    /// Also write wall-clock solve times (these differ between runs).
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw the synthetic trip population.
    GenTrips {
        /// Defaults to `<out-dir>/trips.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one policy end to end.
    Run {
        #[arg(long)]
        trips: Option<PathBuf>,
        #[arg(long, default_value = "dynamic", value_parser = parse_policy)]
        policy: Policy,
    },
    /// Run all four policies on the same demand.
    Compare {
        #[arg(long)]
        trips: Option<PathBuf>,
    },
    /// Lane-count by capture-rate sweep of the dynamic policy.
    Sweep {
        #[arg(long)]
        trips: Option<PathBuf>,
    },
    /// Write the optimisation model in CPLEX-LP format.
    ExportLp {
        #[arg(long)]
        trips: Option<PathBuf>,
        /// Defaults to `<out-dir>/model.lp`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_IO: u8 = 4;

fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Io(_) => EXIT_IO,
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        Error::SweepCell { source, .. } => core_exit_code(source),
        _ => EXIT_CONFIG,
    }
}

/// Maps a failure to the documented exit status.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return core_exit_code(e);
        }
        if cause.is::<toml::de::Error>() {
            return EXIT_CONFIG;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_CONFIG
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = cli.out_dir {
        config.out_dir = dir;
    }
    config.validate()?;
    let opts = commands::Options {
        timings: cli.timings,
    };
    match cli.command {
        Command::GenTrips { out } => commands::gen_trips(&config, out.as_deref()),
        Command::Run { trips, policy } => commands::run(&config, trips.as_deref(), policy, &opts),
        Command::Compare { trips } => commands::compare(&config, trips.as_deref(), &opts),
        Command::Sweep { trips } => commands::sweep(&config, trips.as_deref(), &opts),
        Command::ExportLp { trips, out } => {
            commands::export_lp(&config, trips.as_deref(), out.as_deref())
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

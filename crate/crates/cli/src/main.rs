//! `omlat`: spectra, topology, simulated modeshape measurements, disorder
//! ensembles and circuit parameters for optomechanical lattices.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::output::{Format, Staging};

#[derive(Parser)]
#[command(name = "omlat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, replaced atomically on success.
    #[arg(long)]
    out: PathBuf,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Format of tabular outputs.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Override a configuration value, e.g. `--set lattice.couplings.jp=300e6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenfrequencies, modeshapes and passband annotations.
    Spectrum(Common),
    /// Winding number, Zak phase and edge-state predictions.
    Topology(Common),
    /// Simulate a modeshape measurement of a chain.
    MeasureSim(Common),
    /// Reconstruct the Hamiltonian from a measurement dataset.
    Recover {
        #[command(flatten)]
        common: Common,
        /// Directory written by `measure-sim`.
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Disorder ensemble of the hybridization factor.
    Disorder(Common),
    /// Circuit parameters realizing the lattice couplings.
    Circuit(Common),
}

fn run(cli: Cli) -> CliResult<String> {
    let common = match &cli.command {
        Command::Spectrum(c)
        | Command::Topology(c)
        | Command::MeasureSim(c)
        | Command::Disorder(c)
        | Command::Circuit(c) => c,
        Command::Recover { common, .. } => common,
    };
    let loaded = config::load(&common.config, &common.overrides)?;
    if let Command::Recover { dataset, .. } = &cli.command {
        if same_path(dataset, &common.out) {
            return Err(CliError::config("--out must differ from --dataset"));
        }
    }
    let seed = loaded.seed(common.seed);
    let out = Staging::new(&common.out)?;
    let fmt = common.format;
    let summary = match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&loaded, &out, fmt)?,
        Command::Topology(_) => commands::topology(&loaded, &out, fmt)?,
        Command::MeasureSim(_) => commands::measure_sim(&loaded, &out, seed)?,
        Command::Recover { dataset, .. } => commands::recover(&loaded, dataset, &out, fmt)?,
        Command::Disorder(_) => commands::disorder(&loaded, &out, seed, fmt)?,
        Command::Circuit(_) => commands::circuit(&loaded, &out, fmt)?,
    };
    out.commit()?;
    Ok(summary)
}

fn same_path(a: &std::path::Path, b: &std::path::Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("omlat: {e}");
            e.kind.exit_code()
        }
    }
}

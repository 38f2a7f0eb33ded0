//! Command-line front end: reads a TOML run configuration and writes
//! CSV/JSON results into an output directory.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Format, Output};

#[derive(Parser)]
#[command(
    name = "bic-entangle",
    version,
    about = "Rates, dynamics and entanglement of two emitters coupled through a metasurface BIC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for synthetic data; overrides `seed` in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Free-space Γ12/Γ0 and Ω12/Γ0 against separation, or echo [rates].
    Rates,
    /// Cosine expansion of the lattice CDOS from lattice sums.
    LatticeCoeffs,
    /// Γ12/Γ0 and β̄ of the single-mode model against separation.
    CdosModel,
    /// Integrate the two-emitter dynamics from |e1 g2> and track concurrence.
    Simulate,
    /// Analytic C_max and t_max against separation.
    Sweep,
    /// Fit the CDOS or Purcell-profile model to data.
    Fit,
    /// Weak/strong coupling classification.
    Validity,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::LatticeCoeffs => "lattice-coeffs",
            Command::CdosModel => "cdos-model",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Fit => "fit",
            Command::Validity => "validity",
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let (mut config, base_dir) = match &cli.config {
        Some(p) => (
            RunConfig::load(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    config.seed = Some(seed);
    let ctx = Context {
        config: &config,
        base_dir: &base_dir,
        seed,
    };
    let mut out = Output::new(&cli.out, cli.format, cli.command.name(), config.clone())?;
    match cli.command {
        Command::Rates => commands::rates(&ctx, &mut out)?,
        Command::LatticeCoeffs => commands::lattice_coeffs(&ctx, &mut out)?,
        Command::CdosModel => commands::cdos_model(&ctx, &mut out)?,
        Command::Simulate => commands::simulate(&ctx, &mut out)?,
        Command::Sweep => commands::sweep(&ctx, &mut out)?,
        Command::Fit => commands::fit(&ctx, &mut out)?,
        Command::Validity => commands::validity(&ctx, &mut out)?,
    }
    Ok(out.written().to_vec())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

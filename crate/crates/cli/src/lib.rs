//! Command-line driver for `surftrap-core`.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "surftrap", version, about = "Spectra, surface shifts and Yukawa limits for atoms in a mirror-terminated optical lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override one config entry; repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,

    /// Output directory (overrides output.directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Eigenpair cache directory (overrides cache.directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub cache: Option<PathBuf>,

    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Worker threads.
    #[arg(long, global = true, value_name = "K")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Ladder energies and spacings.
    Spectrum,
    /// Atom-surface potential profiles and the local power-law exponent.
    Potential,
    /// Finite-size surface shifts of the ladder states.
    Corrections,
    /// Two-isotope differential signal of a Yukawa interaction.
    Yukawa,
    /// Yukawa exclusion curves for each scenario.
    Exclusion,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Potential => "potential",
            Self::Corrections => "corrections",
            Self::Yukawa => "yukawa",
            Self::Exclusion => "exclusion",
        }
    }
}

/// Resolves the config from file, `--set` entries and flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = config::load(cli.config.as_deref(), &cli.set)?;
    if let Some(d) = &cli.out {
        cfg.output.directory = d.clone();
    }
    if let Some(d) = &cli.cache {
        cfg.cache.directory = d.clone();
    }
    if cli.no_cache {
        cfg.cache.enabled = false;
    }
    Ok(cfg)
}

/// Runs one subcommand and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve(cli)?;
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    log::info!("{} with config {}", cli.command.name(), cfg.hash());
    let ctx = commands::Context::new(cfg);
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Potential => commands::potential(&ctx),
        Command::Corrections => commands::corrections(&ctx),
        Command::Yukawa => commands::yukawa(&ctx),
        Command::Exclusion => commands::exclusion(&ctx),
    }
}

//! Command-line runner for nested-walk experiments.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nestedwalk", version, about = "Nested random-walk experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build the nested family, write every level and its stopping times.
    Construct,
    /// Local times of the top level at the horizon, and a field grid.
    Localtime,
    /// Mean consecutive-level distances and their decay rates.
    Converge,
    /// Monte Carlo check of every configured bound, plus oracle rows.
    Verify,
    /// Exact enumeration cross-checks.
    Oracle,
}

/// Flags override the environment, which overrides the config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true, env = "NESTEDWALK_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "NESTEDWALK_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true, env = "NESTEDWALK_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "NESTEDWALK_REPLICATIONS")]
    replications: Option<usize>,
    #[arg(long = "m-max", global = true, env = "NESTEDWALK_M_MAX")]
    m_max: Option<u32>,
    #[arg(long = "K", global = true, env = "NESTEDWALK_K")]
    horizon: Option<f64>,
    #[arg(long = "C", global = true, env = "NESTEDWALK_C")]
    c: Option<f64>,
    #[arg(long, global = true, env = "NESTEDWALK_THREADS")]
    threads: Option<usize>,
}

fn resolve(o: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = o.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = &o.out {
        cfg.out = v.clone();
    }
    if let Some(v) = o.replications {
        cfg.replications = Some(v);
    }
    if let Some(v) = o.m_max {
        cfg.m_max = v;
    }
    if let Some(v) = o.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = o.c {
        cfg.c = v;
    }
    if let Some(v) = o.threads {
        cfg.threads = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = resolve(&cli.overrides)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Resource(e.to_string()))?;
    }
    match cli.command {
        Command::Construct => commands::construct(&cfg),
        Command::Localtime => commands::localtime(&cfg),
        Command::Converge => commands::converge(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("nestedwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

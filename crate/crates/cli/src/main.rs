//! `kitaev-de`: evaluate extended Kitaev chains from a JSON config or flags.
//!
//! Exit status 1 means the configuration was rejected, 2 means a numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod config;
mod output;
mod tasks;

use config::{ConfigError, RawConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "kitaev-de", version, about = "Diagonal entropy and topology of extended Kitaev chains")]
struct Cli {
    /// Flat JSON config. Flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved config as JSON and exit without computing.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    overrides: RawConfig,
}

enum Failure {
    Config(ConfigError),
    Numeric(kitaev_de::Error),
    Io(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            Failure::Numeric(e) => {
                eprintln!("error: {}: {e}", e.name());
                ExitCode::from(2)
            }
            Failure::Io(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let raw = match &cli.config {
        Some(path) => RawConfig::load(path).map_err(Failure::Config)?,
        None => RawConfig::default(),
    }
    .overlay(&cli.overrides);
    let env_threads = std::env::var("KITAEV_DE_THREADS").ok();
    let mut cfg = RunConfig::resolve(&raw, env_threads.as_deref()).map_err(Failure::Config)?;
    if cli.check {
        println!("{}", serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Io(e.to_string()))?);
        return Ok(());
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    if let Err(e) = pool {
        log::warn!("thread pool already set up: {e}");
    }
    cfg.threads = rayon::current_num_threads();

    let out = match tasks::run(&cfg) {
        Ok(o) => o,
        // the library only raises InvalidSpec for inputs validation could not see
        Err(kitaev_de::Error::InvalidSpec(m)) => return Err(Failure::Config(ConfigError::new("spec", m))),
        Err(e) => return Err(Failure::Numeric(e)),
    };
    output::write_csv(&cfg.out, &out.table)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", cfg.out.display())))?;
    let sidecar = output::write_sidecar(&cfg.out, &cfg, &out.result)
        .map_err(|e| Failure::Io(format!("cannot write sidecar for {}: {e}", cfg.out.display())))?;
    log::info!("wrote {} and {}", cfg.out.display(), sidecar.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

//! `fdx` — Monte Carlo simulator for a full-duplex mmWave link with hybrid
//! beamforming under receive-chain saturation limits.
//!
//! `run` executes trials at one configuration; `sweep` runs a named
//! figure-style parameter grid. Both write one CSV row per (sweep point,
//! trial) and are byte-for-byte reproducible for a fixed config and seed.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use fdx::error::{Error, Result};
use fdx::sim::{run_sweep, write_csv_file, Preset, SystemConfig};

#[derive(Parser)]
#[command(
    name = "fdx",
    version,
    about = "Full-duplex hybrid beamforming Monte Carlo simulator"
)]
struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo trials at the configuration in the given file.
    Run {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Override the configured trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the configured base seed (FDX_SEED wins over this).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named parameter sweep over the base configuration.
    Sweep {
        /// JSON configuration file providing the base scenario.
        #[arg(long)]
        config: PathBuf,
        /// One of: fig_se_snr, fig_cand_snr, fig_se_eta, fig_se_eta_bits,
        /// fig_se_kappa.
        #[arg(long)]
        preset: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// The FDX_SEED environment variable overrides any configured or
/// flag-provided seed.
fn apply_seed_env(cfg: &mut SystemConfig) -> Result<()> {
    if let Ok(raw) = std::env::var("FDX_SEED") {
        cfg.seed = raw.trim().parse().map_err(|_| {
            Error::Config(format!("FDX_SEED must be an unsigned integer, got '{raw}'"))
        })?;
    }
    Ok(())
}

fn real_main(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("building the thread pool: {e}")))?;
    }
    match cli.command {
        Command::Run {
            config,
            trials,
            seed,
            out,
        } => {
            let mut cfg = SystemConfig::from_path(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            apply_seed_env(&mut cfg)?;
            cfg.validate()?;
            let records = run_sweep(&cfg, &[])?;
            write_csv_file(&out, &records)?;
            eprintln!("wrote {} rows to {}", records.len(), out.display());
        }
        Command::Sweep {
            config,
            preset,
            out,
        } => {
            let mut cfg = SystemConfig::from_path(&config)?;
            apply_seed_env(&mut cfg)?;
            cfg.validate()?;
            let preset = Preset::parse(&preset)?;
            let points = preset.points();
            let records = run_sweep(&cfg, &points)?;
            write_csv_file(&out, &records)?;
            eprintln!(
                "wrote {} rows ({} sweep points x {} trials) to {}",
                records.len(),
                points.len(),
                cfg.trials,
                out.display()
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = real_main(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

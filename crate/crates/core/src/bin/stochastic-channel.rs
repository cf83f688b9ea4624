use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stochastic_channel::config::RunConfig;
use stochastic_channel::run::{execute, Command};

#[derive(Parser)]
#[command(version, about = "Stochastic channel flow with fractional boundary noise")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exponent ledger for the configured noise and r
    Exponents(Common),
    /// Sample the boundary noise and write its coefficients
    SampleNoise(Common),
    /// Boundary convolution w_g: norms, blow-up profile, Hölder fit, weak residual
    RunLinear(Common),
    /// Splitting run: per-level norms, energy and telescoping residuals, snapshots
    RunFull(Common),
    /// Interior decay probe, threshold table, Hurst report
    Diagnostics(Common),
}

#[derive(Args)]
struct Common {
    /// TOML or JSON config (a manifest.json replays its run)
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Exponents(a) => (Command::Exponents, a),
        Sub::SampleNoise(a) => (Command::SampleNoise, a),
        Sub::RunLinear(a) => (Command::RunLinear, a),
        Sub::RunFull(a) => (Command::RunFull, a),
        Sub::Diagnostics(a) => (Command::Diagnostics, a),
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let mut config = match RunConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    match execute(command, &config, &args.out) {
        Ok(m) => {
            log::info!("{command} finished in {:.2}s, wrote {}", m.wall_clock_seconds, args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

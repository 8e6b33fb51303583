use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use czo_cli::commands;
use czo_cli::config::ExperimentConfig;

/// Batch experiment runner for the dyadic operator laboratory.
#[derive(Parser)]
#[command(name = "czo", version, about)]
struct Cli {
    /// TOML configuration file; omitted keys use built-in defaults.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Root seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for Monte-Carlo loops (overrides the config file).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Force sequential execution with fixed summation order. Outputs are
    /// designed to be identical either way; this pins the schedule too.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every exact-identity check at the configured sizes.
    Verify,
    /// Monte-Carlo pi_good against the exact enumeration oracle, plus the
    /// good-cube decoupling identity.
    PiGood,
    /// Haar coefficient decay of the Hilbert kernel.
    Decay,
    /// Random-grid shift average against the Hilbert transform.
    ShiftAvg,
    /// Paraproduct dimension-growth search.
    Growth,
    /// Operator-norm methods and norm-inequality ratio suites.
    Norms,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    cfg.validate()?;
    czo_cli::setup_workers(cfg.jobs, cfg.deterministic);

    let out_dir = PathBuf::from(&cfg.out_dir);
    let record = match cli.command {
        Command::Verify => commands::verify::run(&cfg, &out_dir)?,
        Command::PiGood => commands::pi_good::run(&cfg, &out_dir)?,
        Command::Decay => commands::decay::run(&cfg, &out_dir)?,
        Command::ShiftAvg => commands::shift_avg::run(&cfg, &out_dir)?,
        Command::Growth => commands::growth::run(&cfg, &out_dir)?,
        Command::Norms => commands::norms::run(&cfg, &out_dir)?,
    };
    record.report();
    println!(
        "{}: {} checks, config {}, {:.2}s",
        record.experiment,
        record.checks.len(),
        record.config_hash,
        record.wall_clock_seconds
    );
    Ok(record.all_passed())
}

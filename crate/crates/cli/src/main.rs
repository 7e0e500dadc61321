use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lqrpid_cli::{run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lqrpid", version, about = "LQR-based PID tuning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML experiment configuration (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `ga.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// GA search for the LQR weights; writes results.json, trace.csv, history.csv.
    Tune,
    /// Closed-loop run of the configured gains; writes trace.csv, metrics.json.
    Simulate,
    /// Eigenvalues and definiteness of P_a − P_b; writes compare.json.
    #[command(name = "compare-p")]
    CompareP,
    /// Fractional cost trajectories for several orders; writes fracdemo.csv.
    Fracdemo,
    /// Pole locations over a range of sampling times; writes ts_sweep.csv.
    #[command(name = "ts-sweep")]
    TsSweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Tune => Command::Tune,
            Sub::Simulate => Command::Simulate,
            Sub::CompareP => Command::CompareP,
            Sub::Fracdemo => Command::Fracdemo,
            Sub::TsSweep => Command::TsSweep,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = Command::from(cli.command);
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path),
        None => Ok(ExperimentConfig::default()),
    };
    let result = config.and_then(|mut config| {
        if let Some(seed) = cli.seed {
            config.ga.seed = seed;
        }
        run(command, &config, &cli.out)
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

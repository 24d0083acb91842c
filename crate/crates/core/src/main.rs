use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use double_irs::channel::ScenarioConfig;
use double_irs::experiments::{emit_csv, run_sweep, write_csv, ExperimentConfig, Preset};
use double_irs::{Error, Result};

/// Monte Carlo sweeps for the double-IRS uplink.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON for presets, or a full experiment JSON for `run`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Trials per sweep point [default: 500].
    #[arg(long, global = true)]
    trials: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output CSV; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// NMSE vs inter-IRS Rician factor.
    Fig2a,
    /// Receive SNR vs inter-IRS Rician factor.
    Fig2b,
    /// Rate vs sub-surfaces per IRS.
    Fig3a,
    /// Rate vs transmit power.
    Fig3b,
    /// Run an experiment described by `--config`.
    Run,
    /// Print the default scenario as JSON.
    Scenario,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

fn experiment(cli: &Cli, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let mut exp = match preset {
        Some(p) => {
            let scenario = match &cli.config {
                Some(path) => {
                    let s = ScenarioConfig::from_json(&read(path)?)?;
                    s.validate()?;
                    s
                }
                None => ScenarioConfig::standard(),
            };
            p.build(scenario, 500, 0)
        }
        None => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("`run` requires --config <json>".into()))?;
            ExperimentConfig::from_json(&read(path)?)?
        }
    };
    if let Some(t) = cli.trials {
        exp.n_trials = t;
    }
    if let Some(s) = cli.seed {
        exp.master_seed = s;
    }
    Ok(exp)
}

fn run(cli: Cli) -> Result<()> {
    let preset = match cli.command {
        Command::Fig2a => Some(Preset::Fig2a),
        Command::Fig2b => Some(Preset::Fig2b),
        Command::Fig3a => Some(Preset::Fig3a),
        Command::Fig3b => Some(Preset::Fig3b),
        Command::Run => None,
        Command::Scenario => {
            println!("{}", ScenarioConfig::standard().to_json()?);
            return Ok(());
        }
    };
    let exp = experiment(&cli, preset)?;
    let result = run_sweep(&exp, cli.threads)?;
    match &cli.out {
        Some(path) => emit_csv(&result, path),
        None => {
            let stdout = std::io::stdout();
            write_csv(&result, stdout.lock()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! `og`: train, evaluate, sweep, and replay planar occluded-grasping
//! policies.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime abort.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "og", about = "Planar occluded-grasping simulator and RL toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML run configuration (defaults used when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Rollout worker override.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory override.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Print the fully annotated default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy (rollouts, SAC updates, curriculum, checkpoints).
    Train {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate a checkpoint (reports, curves, optional trace recording).
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Checkpoint to evaluate.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Record one trace file per episode into out_dir/traces.
        #[arg(long)]
        record_traces: bool,
        /// Evaluate across N grasp ids spanning the trained range.
        #[arg(long)]
        grasp_grid: Option<usize>,
    },
    /// Sensitivity sweep over one parameter or pose-noise sigma.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Parameter name (domain field or noise_object_{x,z,pitch}).
        #[arg(long)]
        param: String,
        /// Comma-separated sweep values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Re-execute a recorded trace open-loop, optionally in a new domain.
    Replay {
        #[command(flatten)]
        common: CommonArgs,
        /// Trace file recorded by `eval --record-traces`.
        #[arg(long)]
        trace: PathBuf,
        /// Domain overrides, e.g. --set object_density=172.
        #[arg(long = "set", value_parser = parse_override)]
        overrides: Vec<(String, f64)>,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad value in '{s}': {e}"))?;
    Ok((k.to_string(), v))
}

fn load_config(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.io.master_seed = seed;
    }
    if let Some(workers) = common.workers {
        cfg.io.workers = workers;
    }
    if let Some(dir) = &common.out_dir {
        cfg.io.out_dir = dir.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Train { common }
        | Command::Eval { common, .. }
        | Command::Sweep { common, .. }
        | Command::Replay { common, .. } => common.clone(),
    };
    if common.print_defaults {
        print!("{}", config::annotated_defaults());
        return ExitCode::SUCCESS;
    }
    let cfg = match load_config(&common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Train { .. } => output::cmd_train(&cfg),
        Command::Eval { checkpoint, record_traces, grasp_grid, .. } => {
            output::cmd_eval(&cfg, checkpoint, record_traces, grasp_grid)
        }
        Command::Sweep { checkpoint, param, values, .. } => {
            output::cmd_sweep(&cfg, checkpoint, &param, &values)
        }
        Command::Replay { trace, overrides, .. } => output::cmd_replay(&cfg, &trace, &overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(output::CmdError::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(output::CmdError::Runtime(e)) => {
            eprintln!("runtime abort: {e:#}");
            ExitCode::from(3)
        }
    }
}

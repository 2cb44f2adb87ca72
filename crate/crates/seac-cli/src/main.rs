//! `seac` — train, evaluate, trace and compare variable-control-rate SAC
//! runs on the 2D Newtonian navigation task.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seac_core::harness::{self, RunConfig};
use seac_core::Algo;

#[derive(Parser)]
#[command(name = "seac", version, about = "Soft Elastic Actor-Critic experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Seac,
    SacFixed,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Seac => Algo::Seac,
            AlgoArg::SacFixed => Algo::SacFixed,
        }
    }
}

/// Options shared by every subcommand that builds a run config.
#[derive(Args)]
struct ConfigArgs {
    /// Config file (TOML, flat keys); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Root random seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,

    /// Algorithm (overrides the config file).
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,

    /// Total environment steps to train (overrides the config file).
    #[arg(long)]
    steps: Option<u64>,

    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(algo) = self.algo {
            cfg.algo = algo.into();
        }
        if let Some(steps) = self.steps {
            cfg.total_steps = steps;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy and write metrics, eval curves and checkpoints.
    Train {
        #[command(flatten)]
        config: ConfigArgs,

        /// Resume from a previously written checkpoint.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Evaluate a checkpoint with the deterministic (mean-action) policy.
    Eval {
        #[command(flatten)]
        config: ConfigArgs,

        /// Checkpoint to evaluate.
        #[arg(long)]
        checkpoint: PathBuf,

        /// Number of evaluation episodes.
        #[arg(long, default_value_t = 100)]
        episodes: u32,
    },
    /// Export the per-step trace of one deterministic episode.
    Trace {
        #[command(flatten)]
        config: ConfigArgs,

        /// Checkpoint to trace.
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Summarize and compare evaluation tables across runs.
    Compare {
        /// Eval files produced by `seac eval`.
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, checkpoint } => {
            let cfg = config.resolve()?;
            let summary = harness::run_train(&cfg, checkpoint.as_deref())?;
            println!(
                "trained {} env steps, {} episodes, {} updates in {:.1}s",
                summary.env_steps, summary.episodes, summary.updates, summary.wall_seconds
            );
            println!(
                "range safety: {} duration violations, {} force violations",
                summary.duration_violations, summary.force_violations
            );
            println!("metrics: {}", summary.metrics_path.display());
            println!("final checkpoint: {}", summary.final_checkpoint.display());
        }
        Command::Eval { config, checkpoint, episodes } => {
            let cfg = config.resolve()?;
            let out = config.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            let summary = harness::run_eval(&cfg, &checkpoint, episodes, Some(&out))?;
            print!("{}", summary.format_table());
            println!("eval table: {}", out.join("eval.csv").display());
        }
        Command::Trace { config, checkpoint } => {
            let cfg = config.resolve()?;
            let out = config.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            let (path, rows) = harness::export_trace(&cfg, &checkpoint, cfg.seed, &out)?;
            println!("traced {} steps to {}", rows.len(), path.display());
        }
        Command::Compare { files } => {
            let summary = harness::compare(&files)?;
            print!("{}", summary.format_table());
        }
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glide_core::evalkit::EvalMode;
use glide_core::pipeline::{cmd_analyze, cmd_eval, cmd_gen_synonyms, cmd_gen_testset, cmd_train, RunConfig};
use glide_core::GlideError;

#[derive(Parser)]
#[command(name = "glide", version, about = "Teacher-student curriculum training for instruction-following gridworld agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a setting, e.g. --set run.master_seed=3.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synonym database for the full event vocabulary.
    GenSynonyms(Common),
    /// Write a random-agent test set.
    GenTestset(Common),
    /// Train (or resume) the teachers and the student.
    Train(Common),
    /// Greedy success rate of a trained student on the test set.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// train_synonyms, holdout_synonyms or onehot.
        #[arg(long)]
        mode: Option<String>,
        /// Shorthand for --mode holdout_synonyms.
        #[arg(long, conflicts_with = "mode")]
        holdout: bool,
        #[arg(long)]
        eval_workers: Option<usize>,
    },
    /// Max-Q versus synonym distance from the root instruction.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        eval_workers: Option<usize>,
    },
}

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_DIVERGED: u8 = 4;

fn exit_code(e: &GlideError) -> u8 {
    match e {
        GlideError::Config(_) | GlideError::Capacity(_) => EXIT_CONFIG,
        GlideError::Io { .. } | GlideError::Format(_) | GlideError::Input(_) | GlideError::Lookup(_) => EXIT_INPUT,
        GlideError::Training(_) => EXIT_DIVERGED,
        GlideError::Shape { .. } => EXIT_OTHER,
    }
}

fn load(common: &Common) -> Result<RunConfig, GlideError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for kv in &common.overrides {
        cfg.apply_override(kv)?;
    }
    Ok(cfg)
}

fn with_workers(mut cfg: RunConfig, workers: Option<usize>) -> RunConfig {
    if let Some(k) = workers {
        cfg.eval_workers = k;
    }
    cfg
}

fn run(cli: Cli) -> Result<(), GlideError> {
    match cli.command {
        Command::GenSynonyms(common) => {
            let cfg = load(&common)?;
            let db = cmd_gen_synonyms(&cfg)?;
            println!("wrote {} synonym sets to {}", db.len(), cfg.synonyms_path.display());
        }
        Command::GenTestset(common) => {
            let cfg = load(&common)?;
            let ts = cmd_gen_testset(&cfg)?;
            println!("wrote {} test cases to {}", ts.len(), cfg.testset_path.display());
        }
        Command::Train(common) => {
            let cfg = load(&common)?;
            let s = cmd_train(&cfg)?;
            println!("rollouts={} env_steps={}", s.rollouts, s.env_steps);
            if let Some(rate) = s.last_eval {
                println!("eval_success={rate}");
            }
        }
        Command::Eval {
            common,
            checkpoint,
            mode,
            holdout,
            eval_workers,
        } => {
            let cfg = with_workers(load(&common)?, eval_workers);
            let mode = match (holdout, mode) {
                (true, _) => Some(EvalMode::HoldoutSynonyms),
                (false, Some(m)) => Some(m.parse()?),
                (false, None) => None,
            };
            let report = cmd_eval(&cfg, &checkpoint, mode)?;
            println!("success_rate={}", report.success_rate());
        }
        Command::Analyze {
            common,
            checkpoint,
            eval_workers,
        } => {
            let cfg = with_workers(load(&common)?, eval_workers);
            let report = cmd_analyze(&cfg, &checkpoint)?;
            match report.trend_slope {
                Some(s) => println!("trend_slope={s}"),
                None => println!("trend_slope=undefined"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

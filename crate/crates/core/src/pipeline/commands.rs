use std::path::{Path, PathBuf};

use super::config::RunConfig;
use crate::embed::{EmbedderRegistry, GoalEmbedder};
use crate::error::{GlideError, Result};
use crate::evalkit::{eval_success, gen_testset, q_distance_analysis, EvalMode, EvalReport, EvalSetup, QDistanceReport, TestSet};
use crate::instructor::{DbHeader, SynonymDb};
use crate::orchestrator::{
    load_student_net, Curriculum, MetricsWriter, PolicyRegistry, QFunction, TrainSettings, Trainer, RUN_STATE,
};

/// Path of the resolved-config file written beside `output`.
pub fn resolved_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".config");
    output.with_file_name(name)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| GlideError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| GlideError::io(path, e))
}

fn write_with_config(cfg: &RunConfig, path: &Path, text: &str) -> Result<()> {
    write(path, text)?;
    write(&resolved_path(path), &cfg.to_text())
}

fn require(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(GlideError::Config(format!("{what} {} does not exist", path.display())))
    }
}

/// Generates and writes the synonym database.
pub fn cmd_gen_synonyms(cfg: &RunConfig) -> Result<SynonymDb> {
    let db = SynonymDb::generate(cfg.synonyms_m, cfg.synonyms_seed)?.with_header(DbHeader {
        config_hash: cfg.synonyms_hash(),
        m: cfg.synonyms_m,
        seed: cfg.synonyms_seed,
    });
    write_with_config(cfg, &cfg.synonyms_path, &db.to_jsonl())?;
    Ok(db)
}

/// Generates and writes the random-agent test set.
pub fn cmd_gen_testset(cfg: &RunConfig) -> Result<TestSet> {
    cfg.grid.validate()?;
    let ts = gen_testset(
        &cfg.grid,
        cfg.testset_seed,
        cfg.testset_steps,
        cfg.testset_episodes,
        &cfg.grid_hash(),
    )?;
    write_with_config(cfg, &cfg.testset_path, &ts.to_jsonl())?;
    Ok(ts)
}

/// Loads the synonym database and checks it was produced by this config.
pub fn load_synonyms(cfg: &RunConfig) -> Result<SynonymDb> {
    require(&cfg.synonyms_path, "synonym database")?;
    let db = SynonymDb::load(&cfg.synonyms_path)?;
    if let Some(h) = db.header() {
        if h.config_hash != cfg.synonyms_hash() {
            return Err(GlideError::Config(format!(
                "{} was generated under config {}, current synonym settings hash to {}",
                cfg.synonyms_path.display(),
                h.config_hash,
                cfg.synonyms_hash()
            )));
        }
    }
    Ok(db)
}

/// Loads the test set and checks it was produced for this world.
pub fn load_testset(cfg: &RunConfig) -> Result<TestSet> {
    require(&cfg.testset_path, "test set")?;
    let ts = TestSet::load(&cfg.testset_path)?;
    if ts.meta.config_hash != cfg.grid_hash() {
        return Err(GlideError::Config(format!(
            "{} was generated under world config {}, current world hashes to {}",
            cfg.testset_path.display(),
            ts.meta.config_hash,
            cfg.grid_hash()
        )));
    }
    Ok(ts)
}

pub fn build_embedder(cfg: &RunConfig) -> Result<Box<dyn GoalEmbedder>> {
    let spec = cfg.effective_embedder();
    if let Some(file) = &spec.file {
        require(file, "embedding file")?;
    }
    EmbedderRegistry::builtin().build(&spec)
}

pub fn train_settings(cfg: &RunConfig, testset: Option<&TestSet>) -> Result<TrainSettings> {
    let curriculum = if cfg.onehot_testset {
        let ts = testset.ok_or_else(|| GlideError::Config("onehot_testset needs a test set".into()))?;
        Curriculum::Fixed(ts.as_curriculum())
    } else {
        Curriculum::Teachers {
            count: cfg.teachers,
            policy: if cfg.random_teachers { "random" } else { "d3qn" }.into(),
        }
    };
    Ok(TrainSettings {
        grid: cfg.grid,
        trainer: cfg.trainer.clone(),
        curriculum,
        master_seed: cfg.master_seed,
        total_rollouts: cfg.total_rollouts,
        max_env_steps: (cfg.max_env_steps > 0).then_some(cfg.max_env_steps),
        use_bc: !cfg.no_bcl && !cfg.onehot_testset,
        log_wall_time: cfg.log_wall_time,
        config_hash: cfg.train_hash(),
    })
}

fn eval_mode_for(cfg: &RunConfig, embedder: &dyn GoalEmbedder) -> EvalMode {
    if embedder.reads_text() {
        cfg.eval_mode
    } else {
        EvalMode::OneHot
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSummary {
    pub rollouts: u64,
    pub env_steps: u64,
    pub last_eval: Option<f64>,
}

/// Trains (or resumes) a run, writing metrics, checkpoints and the resolved
/// config. All inputs are checked before any training starts.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    let db = load_synonyms(cfg)?;
    let embedder = build_embedder(cfg)?;
    let needs_testset = cfg.onehot_testset || cfg.eval_every > 0;
    let testset = if needs_testset { Some(load_testset(cfg)?) } else { None };
    let settings = train_settings(cfg, testset.as_ref())?;
    let registry = PolicyRegistry::builtin();

    let eval_embedder = build_embedder(cfg)?;
    let resuming = cfg.resume && cfg.checkpoint_dir.join(RUN_STATE).exists();
    let (mut trainer, mut metrics) = if resuming {
        let t = Trainer::resume(&cfg.checkpoint_dir, settings, db.clone(), embedder, &registry)?;
        let m = MetricsWriter::resume(&cfg.metrics_path, t.rollout)?;
        (t, m)
    } else {
        if let Some(dir) = cfg.metrics_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| GlideError::io(dir, e))?;
        }
        let t = Trainer::new(settings, db.clone(), embedder, &registry)?;
        (t, MetricsWriter::create(&cfg.metrics_path)?)
    };
    write(&resolved_path(&cfg.metrics_path), &cfg.to_text())?;
    write(&cfg.checkpoint_dir.join("resolved.config"), &cfg.to_text())?;

    let setup = EvalSetup {
        grid: cfg.grid,
        db: &db,
        embedder: eval_embedder.as_ref(),
        mode: eval_mode_for(cfg, eval_embedder.as_ref()),
        frame_stack: cfg.trainer.frame_stack,
        seed: cfg.eval_seed,
        workers: cfg.eval_workers,
    };
    let mut last_eval = None;
    let result = trainer.run(|t, mut m| {
        if let (Some(ts), true) = (&testset, cfg.eval_every > 0 && m.rollout % cfg.eval_every == 0) {
            let report = eval_success(&t.student.online, ts, &setup)?;
            m.eval_success = Some(report.success_rate());
            last_eval = m.eval_success;
        }
        metrics.write(&m)?;
        if cfg.checkpoint_every > 0 && m.rollout % cfg.checkpoint_every == 0 {
            t.save(&cfg.checkpoint_dir)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => {
            trainer.save(&cfg.checkpoint_dir)?;
            Ok(TrainSummary {
                rollouts: trainer.rollout,
                env_steps: trainer.env_steps,
                last_eval,
            })
        }
        Err(e @ GlideError::Training(_)) => {
            let diag = cfg.checkpoint_dir.join("diverged");
            trainer.save(&diag)?;
            Err(GlideError::Training(format!("{e}; diagnostic checkpoint in {}", diag.display())))
        }
        Err(e) => Err(e),
    }
}

struct EvalInputs {
    db: SynonymDb,
    embedder: Box<dyn GoalEmbedder>,
    testset: TestSet,
    net: crate::qlearn::QNet<f32>,
}

fn eval_inputs(cfg: &RunConfig, checkpoint: &Path) -> Result<EvalInputs> {
    cfg.validate()?;
    let db = load_synonyms(cfg)?;
    let embedder = build_embedder(cfg)?;
    let testset = load_testset(cfg)?;
    require(checkpoint, "checkpoint directory")?;
    let net = load_student_net(checkpoint, None)?;
    Ok(EvalInputs {
        db,
        embedder,
        testset,
        net,
    })
}

fn setup<'a>(cfg: &RunConfig, inputs: &'a EvalInputs, mode: EvalMode) -> EvalSetup<'a> {
    EvalSetup {
        grid: cfg.grid,
        db: &inputs.db,
        embedder: inputs.embedder.as_ref(),
        mode,
        frame_stack: cfg.trainer.frame_stack,
        seed: cfg.eval_seed,
        workers: cfg.eval_workers,
    }
}

/// Greedy success evaluation; writes the per-case CSV. Without an explicit
/// mode, one-hot embedders use `onehot` and others `eval.mode`.
pub fn cmd_eval(cfg: &RunConfig, checkpoint: &Path, mode: Option<EvalMode>) -> Result<EvalReport> {
    let inputs = eval_inputs(cfg, checkpoint)?;
    let mode = mode.unwrap_or_else(|| eval_mode_for(cfg, inputs.embedder.as_ref()));
    let report = eval_success(&inputs.net as &dyn QFunction, &inputs.testset, &setup(cfg, &inputs, mode))?;
    write_with_config(cfg, &cfg.report_path, &report.to_csv())?;
    Ok(report)
}

/// Q-value versus instruction-distance analysis; writes its CSV.
pub fn cmd_analyze(cfg: &RunConfig, checkpoint: &Path) -> Result<QDistanceReport> {
    let inputs = eval_inputs(cfg, checkpoint)?;
    let mode = eval_mode_for(cfg, inputs.embedder.as_ref());
    let mode = if mode == EvalMode::HoldoutSynonyms {
        EvalMode::TrainSynonyms
    } else {
        mode
    };
    let report = q_distance_analysis(&inputs.net, &inputs.testset, &setup(cfg, &inputs, mode))?;
    write_with_config(cfg, &cfg.analysis_path, &report.to_csv())?;
    Ok(report)
}

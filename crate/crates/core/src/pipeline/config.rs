use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::embed::EmbedderSpec;
use crate::envgrid::{EventMask, GridConfig};
use crate::error::{GlideError, Result};
use crate::evalkit::{EvalMode, DEFAULT_EPISODES, DEFAULT_STEPS};
use crate::instructor::DEFAULT_SYNONYMS;
use crate::qlearn::TrainerConfig;

/// Flat `key=value` settings for every command. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub trainer: TrainerConfig,
    pub embedder: EmbedderSpec,
    pub teachers: usize,
    pub total_rollouts: u64,
    /// 0 means unlimited.
    pub max_env_steps: u64,
    pub master_seed: u64,
    pub checkpoint_every: u64,
    pub eval_every: u64,
    pub resume: bool,
    pub log_wall_time: bool,
    pub onehot: bool,
    pub onehot_testset: bool,
    pub random_teachers: bool,
    pub no_bcl: bool,
    pub synonyms_m: usize,
    pub synonyms_seed: u64,
    pub testset_steps: u32,
    pub testset_episodes: usize,
    pub testset_seed: u64,
    pub eval_mode: EvalMode,
    pub eval_seed: u64,
    pub eval_workers: usize,
    pub synonyms_path: PathBuf,
    pub testset_path: PathBuf,
    pub checkpoint_dir: PathBuf,
    pub metrics_path: PathBuf,
    pub report_path: PathBuf,
    pub analysis_path: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridConfig::default(),
            trainer: TrainerConfig::default(),
            embedder: EmbedderSpec::hashed_bow(64),
            teachers: 4,
            total_rollouts: 10_000,
            max_env_steps: 0,
            master_seed: 0,
            checkpoint_every: 0,
            eval_every: 0,
            resume: false,
            log_wall_time: false,
            onehot: false,
            onehot_testset: false,
            random_teachers: false,
            no_bcl: false,
            synonyms_m: DEFAULT_SYNONYMS,
            synonyms_seed: 0,
            testset_steps: DEFAULT_STEPS,
            testset_episodes: DEFAULT_EPISODES,
            testset_seed: 0,
            eval_mode: EvalMode::TrainSynonyms,
            eval_seed: 0,
            eval_workers: 1,
            synonyms_path: "synonyms.jsonl".into(),
            testset_path: "testset.jsonl".into(),
            checkpoint_dir: "checkpoint".into(),
            metrics_path: "metrics.csv".into(),
            report_path: "eval.csv".into(),
            analysis_path: "qdist.csv".into(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| GlideError::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(GlideError::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Key groups feeding each artifact's config hash.
const GRID_KEYS: &str = "grid.";
const SYNONYM_KEYS: &str = "synonyms.m synonyms.seed";

impl RunConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let g = &mut self.grid;
        let t = &mut self.trainer;
        match key {
            "grid.rooms_per_side" => g.rooms_per_side = parse(key, v)?,
            "grid.room_interior" => g.room_interior = parse(key, v)?,
            "grid.n_balls" => g.n_balls = parse(key, v)?,
            "grid.n_boxes" => g.n_boxes = parse(key, v)?,
            "grid.n_keys" => g.n_keys = parse(key, v)?,
            "grid.locked_door_fraction" => g.locked_door_fraction = parse(key, v)?,
            "grid.max_steps" => g.max_steps = parse(key, v)?,
            "grid.events" => g.events = EventMask::parse_list(v)?,
            "trainer.bcl_ratio" => t.bcl_ratio = parse(key, v)?,
            "trainer.frame_stack" => t.frame_stack = parse(key, v)?,
            "trainer.grad_clip" => t.grad_clip = parse(key, v)?,
            "trainer.learning_rate" => t.learning_rate = parse(key, v)?,
            "trainer.tau" => t.tau = parse(key, v)?,
            "trainer.student_reward" => t.student_reward = parse(key, v)?,
            "trainer.teacher_idle_penalty" => t.teacher_idle_penalty = parse(key, v)?,
            "trainer.teacher_fail_reward" => t.teacher_fail_reward = parse(key, v)?,
            "trainer.teacher_reach_penalty" => t.teacher_reach_penalty = parse(key, v)?,
            "trainer.discount" => t.discount = parse(key, v)?,
            "trainer.bc_weight_init" => t.bc_weight_init = parse(key, v)?,
            "trainer.bc_weight_rate" => t.bc_weight_rate = parse(key, v)?,
            "trainer.bc_weight_max" => t.bc_weight_max = parse(key, v)?,
            "trainer.batch_size" => t.batch_size = parse(key, v)?,
            "trainer.updates_per_rollout" => t.updates_per_rollout = parse(key, v)?,
            "trainer.replay_capacity" => t.replay_capacity = parse(key, v)?,
            "trainer.bc_capacity" => t.bc_capacity = parse(key, v)?,
            "trainer.learning_starts" => t.learning_starts = parse(key, v)?,
            "trainer.epsilon_start" => t.epsilon_start = parse(key, v)?,
            "trainer.epsilon_end" => t.epsilon_end = parse(key, v)?,
            "trainer.epsilon_decay_steps" => t.epsilon_decay_steps = parse(key, v)?,
            "trainer.hidden" => {
                t.hidden = v
                    .split(',')
                    .map(|x| parse(key, x.trim()))
                    .collect::<Result<_>>()?
            }
            "trainer.bonus_scale" => t.bonus_scale = parse(key, v)?,
            "trainer.bonus_decay" => t.bonus_decay = parse(key, v)?,
            "embedder.kind" => self.embedder.kind = v.to_owned(),
            "embedder.dim" => self.embedder.dim = parse(key, v)?,
            "embedder.file" => self.embedder.file = (!v.is_empty()).then(|| PathBuf::from(v)),
            "run.teachers" => self.teachers = parse(key, v)?,
            "run.total_rollouts" => self.total_rollouts = parse(key, v)?,
            "run.max_env_steps" => self.max_env_steps = parse(key, v)?,
            "run.master_seed" => self.master_seed = parse(key, v)?,
            "run.checkpoint_every" => self.checkpoint_every = parse(key, v)?,
            "run.eval_every" => self.eval_every = parse(key, v)?,
            "run.resume" => self.resume = parse_bool(key, v)?,
            "run.log_wall_time" => self.log_wall_time = parse_bool(key, v)?,
            "baseline.onehot" => self.onehot = parse_bool(key, v)?,
            "baseline.onehot_testset" => self.onehot_testset = parse_bool(key, v)?,
            "baseline.random_teachers" => self.random_teachers = parse_bool(key, v)?,
            "baseline.no_bcl" => self.no_bcl = parse_bool(key, v)?,
            "synonyms.m" => self.synonyms_m = parse(key, v)?,
            "synonyms.seed" => self.synonyms_seed = parse(key, v)?,
            "testset.steps" => self.testset_steps = parse(key, v)?,
            "testset.episodes" => self.testset_episodes = parse(key, v)?,
            "testset.seed" => self.testset_seed = parse(key, v)?,
            "eval.mode" => self.eval_mode = v.parse()?,
            "eval.seed" => self.eval_seed = parse(key, v)?,
            "eval.workers" => self.eval_workers = parse(key, v)?,
            "paths.synonyms" => self.synonyms_path = v.into(),
            "paths.testset" => self.testset_path = v.into(),
            "paths.checkpoint_dir" => self.checkpoint_dir = v.into(),
            "paths.metrics" => self.metrics_path = v.into(),
            "paths.report" => self.report_path = v.into(),
            "paths.analysis" => self.analysis_path = v.into(),
            _ => return Err(GlideError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let g = &self.grid;
        let t = &self.trainer;
        vec![
            ("grid.rooms_per_side", g.rooms_per_side.to_string()),
            ("grid.room_interior", g.room_interior.to_string()),
            ("grid.n_balls", g.n_balls.to_string()),
            ("grid.n_boxes", g.n_boxes.to_string()),
            ("grid.n_keys", g.n_keys.to_string()),
            ("grid.locked_door_fraction", g.locked_door_fraction.to_string()),
            ("grid.max_steps", g.max_steps.to_string()),
            ("grid.events", g.events.to_list()),
            ("trainer.bcl_ratio", t.bcl_ratio.to_string()),
            ("trainer.frame_stack", t.frame_stack.to_string()),
            ("trainer.grad_clip", t.grad_clip.to_string()),
            ("trainer.learning_rate", t.learning_rate.to_string()),
            ("trainer.tau", t.tau.to_string()),
            ("trainer.student_reward", t.student_reward.to_string()),
            ("trainer.teacher_idle_penalty", t.teacher_idle_penalty.to_string()),
            ("trainer.teacher_fail_reward", t.teacher_fail_reward.to_string()),
            ("trainer.teacher_reach_penalty", t.teacher_reach_penalty.to_string()),
            ("trainer.discount", t.discount.to_string()),
            ("trainer.bc_weight_init", t.bc_weight_init.to_string()),
            ("trainer.bc_weight_rate", t.bc_weight_rate.to_string()),
            ("trainer.bc_weight_max", t.bc_weight_max.to_string()),
            ("trainer.batch_size", t.batch_size.to_string()),
            ("trainer.updates_per_rollout", t.updates_per_rollout.to_string()),
            ("trainer.replay_capacity", t.replay_capacity.to_string()),
            ("trainer.bc_capacity", t.bc_capacity.to_string()),
            ("trainer.learning_starts", t.learning_starts.to_string()),
            ("trainer.epsilon_start", t.epsilon_start.to_string()),
            ("trainer.epsilon_end", t.epsilon_end.to_string()),
            ("trainer.epsilon_decay_steps", t.epsilon_decay_steps.to_string()),
            ("trainer.hidden", list(&t.hidden)),
            ("trainer.bonus_scale", t.bonus_scale.to_string()),
            ("trainer.bonus_decay", t.bonus_decay.to_string()),
            ("embedder.kind", self.embedder.kind.clone()),
            ("embedder.dim", self.embedder.dim.to_string()),
            (
                "embedder.file",
                self.embedder.file.as_deref().map(path_str).unwrap_or_default(),
            ),
            ("run.teachers", self.teachers.to_string()),
            ("run.total_rollouts", self.total_rollouts.to_string()),
            ("run.max_env_steps", self.max_env_steps.to_string()),
            ("run.master_seed", self.master_seed.to_string()),
            ("run.checkpoint_every", self.checkpoint_every.to_string()),
            ("run.eval_every", self.eval_every.to_string()),
            ("run.resume", self.resume.to_string()),
            ("run.log_wall_time", self.log_wall_time.to_string()),
            ("baseline.onehot", self.onehot.to_string()),
            ("baseline.onehot_testset", self.onehot_testset.to_string()),
            ("baseline.random_teachers", self.random_teachers.to_string()),
            ("baseline.no_bcl", self.no_bcl.to_string()),
            ("synonyms.m", self.synonyms_m.to_string()),
            ("synonyms.seed", self.synonyms_seed.to_string()),
            ("testset.steps", self.testset_steps.to_string()),
            ("testset.episodes", self.testset_episodes.to_string()),
            ("testset.seed", self.testset_seed.to_string()),
            ("eval.mode", self.eval_mode.name().to_owned()),
            ("eval.seed", self.eval_seed.to_string()),
            ("eval.workers", self.eval_workers.to_string()),
            ("paths.synonyms", path_str(&self.synonyms_path)),
            ("paths.testset", path_str(&self.testset_path)),
            ("paths.checkpoint_dir", path_str(&self.checkpoint_dir)),
            ("paths.metrics", path_str(&self.metrics_path)),
            ("paths.report", path_str(&self.report_path)),
            ("paths.analysis", path_str(&self.analysis_path)),
        ]
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GlideError::Config(format!("line {}: expected key=value, got {line:?}", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| GlideError::Config(format!("override {kv:?} is not key=value")))?;
        self.set(k.trim(), v)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| GlideError::io(path, e))?;
        RunConfig::parse_text(&text)
    }

    /// The fully resolved configuration as `key=value` lines.
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Embedder actually used, after baseline switches.
    pub fn effective_embedder(&self) -> EmbedderSpec {
        if self.onehot || self.onehot_testset {
            EmbedderSpec::onehot()
        } else {
            self.embedder.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.trainer.validate()?;
        if self.teachers == 0 && !self.onehot_testset {
            return Err(GlideError::Config("run.teachers must be at least 1".into()));
        }
        if self.eval_workers == 0 {
            return Err(GlideError::Config("eval.workers must be at least 1".into()));
        }
        Ok(())
    }

    fn hash_of(&self, keep: impl Fn(&str) -> bool) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.entries() {
            if keep(k) {
                h.update(format!("{k}={v}\n").as_bytes());
            }
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Hash of the world settings (test sets).
    pub fn grid_hash(&self) -> String {
        self.hash_of(|k| k.starts_with(GRID_KEYS))
    }

    /// Hash of the synonym-generation settings.
    pub fn synonyms_hash(&self) -> String {
        self.hash_of(|k| SYNONYM_KEYS.split(' ').any(|s| s == k))
    }

    /// Hash of everything that shapes a training run's trajectory. Run
    /// length, intervals, evaluation and path settings are excluded so a run
    /// can be extended or relocated.
    pub fn train_hash(&self) -> String {
        let embedder = self.effective_embedder();
        let mut c = self.clone();
        c.embedder = EmbedderSpec { file: None, ..embedder };
        c.hash_of(|k| {
            k.starts_with(GRID_KEYS)
                || k.starts_with("trainer.")
                || k.starts_with("embedder.")
                || k.starts_with("baseline.")
                || SYNONYM_KEYS.split(' ').any(|s| s == k)
                || k == "run.teachers"
                || k == "run.master_seed"
        })
    }
}

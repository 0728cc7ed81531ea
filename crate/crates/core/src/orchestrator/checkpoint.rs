//! Checkpoint directory: one binary file per agent plus `run_state.json`.
//!
//! Agent files are `MAGIC`, a little-endian `u32` header length, a JSON
//! header, then raw little-endian arrays: online parameters, target
//! parameters, Adam first and second moments, the replay buffer and (for
//! the student) the behavioural-cloning buffer.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::policy::PolicyRegistry;
use super::train::{Curriculum, TrainSettings, Trainer, TrainerRngs};
use crate::embed::GoalEmbedder;
use crate::envgrid::Event;
use crate::error::{GlideError, Result};
use crate::instructor::SynonymDb;
use crate::qlearn::{Adam, BcSample, D3qnAgent, NetShape, QNet, ReplayBuffer, Transition};

const MAGIC: &[u8; 8] = b"GLIDEAG1";
pub const RUN_STATE: &str = "run_state.json";
pub const STUDENT_FILE: &str = "student.bin";
const FORMAT_VERSION: u32 = 1;

pub fn teacher_file(index: usize) -> String {
    format!("teacher_{index}.bin")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct AgentHeader {
    config_hash: String,
    shape: NetShape,
    goal_dim: usize,
    frame_len: usize,
    env_steps: u64,
    updates: u64,
    adam_lr: f32,
    adam_beta1: f32,
    adam_beta2: f32,
    adam_eps: f32,
    adam_t: u64,
    replay_len: usize,
    bc_len: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunState {
    version: u32,
    config_hash: String,
    master_seed: u64,
    rollout: u64,
    env_steps: u64,
    bc_weight: f64,
    teachers: usize,
    frequencies: Vec<(Event, u64)>,
    rngs: TrainerRngs,
}

struct Sink<W: Write> {
    inner: W,
    path: PathBuf,
}

impl<W: Write> Sink<W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.inner.write_all(b).map_err(|e| GlideError::io(&self.path, e))
    }

    fn floats(&mut self, xs: &[f32]) -> Result<()> {
        for x in xs {
            self.bytes(&x.to_le_bytes())?;
        }
        Ok(())
    }
}

struct Source<R: Read> {
    inner: R,
    path: PathBuf,
}

impl<R: Read> Source<R> {
    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => {
                GlideError::Format(format!("{} is truncated", self.path.display()))
            }
            _ => GlideError::io(&self.path, e),
        })
    }

    fn bytes(&mut self, n: usize) -> Result<Box<[u8]>> {
        let mut buf = vec![0; n];
        self.fill(&mut buf)?;
        Ok(buf.into_boxed_slice())
    }

    fn byte(&mut self) -> Result<u8> {
        let mut b = [0];
        self.fill(&mut b)?;
        Ok(b[0])
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.bytes(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
            .collect())
    }
}

fn save_agent(path: &Path, agent: &D3qnAgent, config_hash: &str, bc: Option<&ReplayBuffer<BcSample>>) -> Result<()> {
    let header = AgentHeader {
        config_hash: config_hash.to_owned(),
        shape: agent.online.shape().clone(),
        goal_dim: agent.goal_dim(),
        frame_len: agent.frame_len(),
        env_steps: agent.env_steps,
        updates: agent.updates,
        adam_lr: agent.optimizer.lr,
        adam_beta1: agent.optimizer.beta1,
        adam_beta2: agent.optimizer.beta2,
        adam_eps: agent.optimizer.eps,
        adam_t: agent.optimizer.t,
        replay_len: agent.replay.len(),
        bc_len: bc.map_or(0, ReplayBuffer::len),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let file = File::create(path).map_err(|e| GlideError::io(path, e))?;
    let mut out = Sink {
        inner: BufWriter::new(file),
        path: path.to_owned(),
    };
    out.bytes(MAGIC)?;
    out.bytes(&(json.len() as u32).to_le_bytes())?;
    out.bytes(&json)?;
    out.floats(agent.online.params())?;
    out.floats(agent.target.params())?;
    out.floats(&agent.optimizer.m)?;
    out.floats(&agent.optimizer.v)?;
    for t in agent.replay.iter() {
        out.bytes(&t.obs)?;
        out.floats(&t.goal)?;
        out.bytes(&[t.action])?;
        out.floats(&[t.reward])?;
        out.bytes(&t.next_obs)?;
        out.bytes(&[t.done as u8])?;
    }
    for s in bc.into_iter().flat_map(ReplayBuffer::iter) {
        out.bytes(&s.obs)?;
        out.floats(&s.goal)?;
        out.bytes(&[s.action])?;
    }
    out.inner.flush().map_err(|e| GlideError::io(path, e))
}

fn open_agent(path: &Path) -> Result<(AgentHeader, Source<BufReader<File>>)> {
    let file = File::open(path).map_err(|e| GlideError::io(path, e))?;
    let mut src = Source {
        inner: BufReader::new(file),
        path: path.to_owned(),
    };
    let magic = src.bytes(MAGIC.len())?;
    if &*magic != MAGIC {
        return Err(GlideError::Format(format!("{} is not an agent checkpoint", path.display())));
    }
    let len = u32::from_le_bytes(src.bytes(4)?[..].try_into().expect("4 bytes")) as usize;
    let header: AgentHeader = serde_json::from_slice(&src.bytes(len)?)
        .map_err(|e| GlideError::Format(format!("{} header: {e}", path.display())))?;
    Ok((header, src))
}

fn check_hash(path: &Path, found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(GlideError::Config(format!(
            "{} was written under config {found}, current config is {expected}",
            path.display()
        )));
    }
    Ok(())
}

fn load_agent(
    path: &Path,
    settings: &TrainSettings,
    bc_capacity: Option<usize>,
) -> Result<(D3qnAgent, Option<ReplayBuffer<BcSample>>)> {
    let cfg = &settings.trainer;
    let (h, mut src) = open_agent(path)?;
    check_hash(path, &h.config_hash, &settings.config_hash)?;
    let n = h.shape.n_params();
    let online = QNet::from_params(h.shape.clone(), src.floats(n)?)?;
    let target = QNet::from_params(h.shape.clone(), src.floats(n)?)?;
    let optimizer = Adam {
        lr: h.adam_lr,
        beta1: h.adam_beta1,
        beta2: h.adam_beta2,
        eps: h.adam_eps,
        m: src.floats(n)?,
        v: src.floats(n)?,
        t: h.adam_t,
    };
    let mut replay = ReplayBuffer::new(cfg.replay_capacity);
    for _ in 0..h.replay_len {
        replay.push(Transition {
            obs: src.bytes(h.frame_len)?,
            goal: src.floats(h.goal_dim)?.into_boxed_slice(),
            action: src.byte()?,
            reward: src.floats(1)?[0],
            next_obs: src.bytes(h.frame_len)?,
            done: src.byte()? != 0,
        });
    }
    let bc = match bc_capacity {
        Some(cap) => {
            let mut bc = ReplayBuffer::new(cap);
            for _ in 0..h.bc_len {
                bc.push(BcSample {
                    obs: src.bytes(h.frame_len)?,
                    goal: src.floats(h.goal_dim)?.into_boxed_slice(),
                    action: src.byte()?,
                });
            }
            Some(bc)
        }
        None => None,
    };
    let agent = D3qnAgent::from_parts(cfg, h.goal_dim, online, target, optimizer, replay, h.env_steps, h.updates);
    Ok((agent, bc))
}

/// Reads only the student's online network, for evaluation.
pub fn load_student_net(dir: &Path, config_hash: Option<&str>) -> Result<QNet<f32>> {
    let path = dir.join(STUDENT_FILE);
    let (h, mut src) = open_agent(&path)?;
    if let Some(expected) = config_hash {
        check_hash(&path, &h.config_hash, expected)?;
    }
    QNet::from_params(h.shape.clone(), src.floats(h.shape.n_params())?)
}

/// Writes a student-only checkpoint holding `net` (tests and tooling).
pub fn save_student_net(dir: &Path, net: &QNet<f32>, config_hash: &str, frame_len: usize) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| GlideError::io(dir, e))?;
    let goal_dim = net.input_dim().checked_sub(frame_len).ok_or(GlideError::Shape {
        expected: frame_len,
        got: net.input_dim(),
    })?;
    let mut cfg = crate::qlearn::TrainerConfig {
        hidden: net.shape().hidden.clone(),
        replay_capacity: 1,
        ..Default::default()
    };
    cfg.frame_stack = frame_len / crate::envgrid::VIEW_CELLS;
    let n = net.params().len();
    let agent = D3qnAgent::from_parts(
        &cfg,
        goal_dim,
        net.clone(),
        net.clone(),
        Adam::new(n, cfg.learning_rate as f32),
        ReplayBuffer::new(1),
        0,
        0,
    );
    save_agent(&dir.join(STUDENT_FILE), &agent, config_hash, None)
}

impl Trainer {
    /// Writes every agent and the run state into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| GlideError::io(dir, e))?;
        let hash = &self.settings.config_hash;
        save_agent(&dir.join(STUDENT_FILE), &self.student, hash, Some(&self.bc))?;
        for (i, t) in self.teachers.iter().enumerate() {
            if let Some(agent) = t.learner_ref() {
                save_agent(&dir.join(teacher_file(i)), agent, hash, None)?;
            }
        }
        let state = RunState {
            version: FORMAT_VERSION,
            config_hash: hash.clone(),
            master_seed: self.settings.master_seed,
            rollout: self.rollout,
            env_steps: self.env_steps,
            bc_weight: self.bc_weight,
            teachers: self.teachers.len(),
            frequencies: self.freq.iter().collect(),
            rngs: self.rngs.clone(),
        };
        let path = dir.join(RUN_STATE);
        let json = serde_json::to_string_pretty(&state).expect("run state serializes");
        std::fs::write(&path, json).map_err(|e| GlideError::io(&path, e))
    }

    /// Rebuilds a trainer from `dir`; the settings must hash to the value the
    /// checkpoint was written with.
    pub fn resume(
        dir: &Path,
        settings: TrainSettings,
        db: SynonymDb,
        embedder: Box<dyn GoalEmbedder>,
        registry: &PolicyRegistry,
    ) -> Result<Trainer> {
        let path = dir.join(RUN_STATE);
        let text = std::fs::read_to_string(&path).map_err(|e| GlideError::io(&path, e))?;
        let state: RunState =
            serde_json::from_str(&text).map_err(|e| GlideError::Format(format!("{}: {e}", path.display())))?;
        if state.version != FORMAT_VERSION {
            return Err(GlideError::Format(format!("unsupported checkpoint version {}", state.version)));
        }
        check_hash(&path, &state.config_hash, &settings.config_hash)?;
        if state.master_seed != settings.master_seed {
            return Err(GlideError::Config(format!(
                "checkpoint master seed {} differs from configured {}",
                state.master_seed, settings.master_seed
            )));
        }
        let mut trainer = Trainer::new(settings, db, embedder, registry)?;
        if state.teachers != trainer.teachers.len() {
            return Err(GlideError::Config(format!(
                "checkpoint has {} teachers, config asks for {}",
                state.teachers,
                trainer.teachers.len()
            )));
        }
        let (student, bc) = load_agent(
            &dir.join(STUDENT_FILE),
            &trainer.settings,
            Some(trainer.settings.trainer.bc_capacity),
        )?;
        if student.goal_dim() != trainer.embedder.dim() {
            return Err(GlideError::Config(format!(
                "checkpoint goal width {} differs from embedder width {}",
                student.goal_dim(),
                trainer.embedder.dim()
            )));
        }
        trainer.student = student;
        trainer.bc = bc.expect("requested");
        if matches!(trainer.settings.curriculum, Curriculum::Teachers { .. }) {
            for i in 0..trainer.teachers.len() {
                if trainer.teachers[i].learner_ref().is_some() {
                    let (agent, _) = load_agent(&dir.join(teacher_file(i)), &trainer.settings, None)?;
                    *trainer.teachers[i].learner().expect("checked") = agent;
                }
            }
        }
        trainer.freq = state.frequencies.into_iter().collect();
        trainer.rollout = state.rollout;
        trainer.env_steps = state.env_steps;
        trainer.bc_weight = state.bc_weight;
        trainer.rngs = state.rngs;
        Ok(trainer)
    }
}

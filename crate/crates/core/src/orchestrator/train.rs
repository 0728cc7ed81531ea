use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::RolloutMetrics;
use super::policy::{Policy, PolicyRegistry};
use super::rewards::{distribute_rewards, fill_bc_buffer, EventFrequency};
use super::rollout::{run_student_for, run_student_rollout, run_teacher_rollout, StudentSetup};
use crate::embed::GoalEmbedder;
use crate::envgrid::{Event, GridConfig, GridState};
use crate::error::{GlideError, Result};
use crate::instructor::{Partition, SynonymDb};
use crate::qlearn::{bc_loss, mix_gradients, update_bc_weight, BcSample, D3qnAgent, ReplayBuffer, TrainerConfig};
use crate::seed::{derive_seed, rng_for, Stream};

/// Where the student's goals come from.
#[derive(Clone, Debug, PartialEq)]
pub enum Curriculum {
    /// Teachers act first and the student follows their events.
    Teachers { count: usize, policy: String },
    /// No teachers: the student cycles through fixed (env seed, events) cases.
    Fixed(Vec<(u64, Vec<Event>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSettings {
    pub grid: GridConfig,
    pub trainer: TrainerConfig,
    pub curriculum: Curriculum,
    pub master_seed: u64,
    pub total_rollouts: u64,
    /// Hard budget on environment steps (teacher plus student): a rollout
    /// only starts if its worst case fits in what remains.
    pub max_env_steps: Option<u64>,
    /// Train the student with the behavioural-cloning term.
    pub use_bc: bool,
    pub log_wall_time: bool,
    pub config_hash: String,
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.trainer.validate()?;
        match &self.curriculum {
            Curriculum::Teachers { count, .. } if *count == 0 => {
                Err(GlideError::Config("at least one teacher is required".into()))
            }
            Curriculum::Fixed(cases) if cases.is_empty() => {
                Err(GlideError::Config("fixed curriculum has no cases".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Every random stream the loop consumes, so a run can be resumed exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainerRngs {
    pub teacher: ChaCha8Rng,
    pub student: ChaCha8Rng,
    pub instructions: ChaCha8Rng,
    pub sampling: ChaCha8Rng,
}

impl TrainerRngs {
    pub fn new(master: u64) -> Self {
        TrainerRngs {
            teacher: rng_for(master, Stream::Exploration, 1),
            student: rng_for(master, Stream::Exploration, 0),
            instructions: rng_for(master, Stream::Instructions, 0),
            sampling: rng_for(master, Stream::Sampling, 0),
        }
    }
}

/// Mutable training state: agents, buffers, counters and RNGs.
pub struct Trainer {
    pub settings: TrainSettings,
    pub db: SynonymDb,
    pub embedder: Box<dyn GoalEmbedder>,
    pub teachers: Vec<Box<dyn Policy>>,
    pub student: D3qnAgent,
    pub bc: ReplayBuffer<BcSample>,
    pub freq: EventFrequency,
    pub bc_weight: f64,
    pub rollout: u64,
    pub env_steps: u64,
    pub rngs: TrainerRngs,
}

#[derive(Default)]
struct LossTally {
    rl: f64,
    bc: f64,
    n_rl: usize,
    n_bc: usize,
}

impl LossTally {
    fn mean_rl(&self) -> Option<f64> {
        (self.n_rl > 0).then(|| self.rl / self.n_rl as f64)
    }

    fn mean_bc(&self) -> Option<f64> {
        (self.n_bc > 0).then(|| self.bc / self.n_bc as f64)
    }
}

fn finite(loss: f32, what: &str) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss as f64)
    } else {
        Err(GlideError::Training(format!("non-finite {what} loss")))
    }
}

impl Trainer {
    pub fn new(
        settings: TrainSettings,
        db: SynonymDb,
        embedder: Box<dyn GoalEmbedder>,
        registry: &PolicyRegistry,
    ) -> Result<Trainer> {
        settings.validate()?;
        let cfg = &settings.trainer;
        let master = settings.master_seed;
        let mut init = rng_for(master, Stream::Init, 0);
        let student = D3qnAgent::new(cfg, embedder.dim(), &mut init)?;
        let teachers = match &settings.curriculum {
            Curriculum::Teachers { count, policy } => (0..*count)
                .map(|i| {
                    let mut rng = rng_for(master, Stream::Init, i as u64 + 1);
                    registry.build(policy, cfg, 0, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?,
            Curriculum::Fixed(_) => Vec::new(),
        };
        let bc_weight = if settings.use_bc { cfg.bc_weight_init } else { 0.0 };
        Ok(Trainer {
            bc: ReplayBuffer::new(cfg.bc_capacity),
            rngs: TrainerRngs::new(master),
            settings,
            db,
            embedder,
            teachers,
            student,
            freq: EventFrequency::new(),
            bc_weight,
            rollout: 0,
            env_steps: 0,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.rollout >= self.settings.total_rollouts
            || self
                .settings
                .max_env_steps
                .is_some_and(|m| self.env_steps + self.max_rollout_steps() > m)
    }

    /// Most environment steps one rollout can take.
    pub fn max_rollout_steps(&self) -> u64 {
        let episode = self.settings.grid.max_steps as u64;
        match self.settings.curriculum {
            Curriculum::Teachers { .. } => 2 * episode,
            Curriculum::Fixed(_) => episode,
        }
    }

    /// Teacher index for the 1-based rollout `r`.
    pub fn teacher_for(rollout: u64, n_teachers: usize) -> usize {
        (rollout % n_teachers as u64) as usize
    }

    pub fn env_seed_for(&self, rollout: u64) -> u64 {
        derive_seed(self.settings.master_seed, Stream::Rollout, rollout)
    }

    /// Runs one full rollout: acting, reward distribution, buffer filling
    /// and agent updates.
    pub fn step(&mut self) -> Result<RolloutMetrics> {
        let started = Instant::now();
        let r = self.rollout + 1;
        let cfg = self.settings.trainer.clone();
        let grid = self.settings.grid;

        let (teacher_id, n_events, n_reached, teacher_reward, steps) = match &self.settings.curriculum {
            Curriculum::Teachers { count, .. } => {
                let k = Self::teacher_for(r, *count);
                let env_seed = self.env_seed_for(r);
                let record = run_teacher_rollout(
                    self.teachers[k].as_mut(),
                    k,
                    &grid,
                    env_seed,
                    cfg.frame_stack,
                    &mut self.rngs.teacher,
                )?;
                let setup = training_setup(&self.db, self.embedder.as_ref(), &cfg);
                let (outcome, transitions) = run_student_for(
                    &mut self.student,
                    &record,
                    &setup,
                    &mut self.rngs.student,
                    &mut self.rngs.instructions,
                )?;
                let rewards = distribute_rewards(&record, &outcome.reached, &mut self.freq, &cfg);
                if self.settings.use_bc {
                    fill_bc_buffer(
                        &record,
                        &outcome.reached,
                        &mut self.bc,
                        &self.db,
                        self.embedder.as_ref(),
                        Partition::Train,
                        &mut self.rngs.instructions,
                    )?;
                }
                if let Some(learner) = self.teachers[k].learner() {
                    learner.replay.extend(record.teacher_transitions(&rewards));
                }
                self.student.replay.extend(transitions);
                (
                    k as i64,
                    record.goals.len(),
                    outcome.n_reached(),
                    rewards.iter().sum::<f64>(),
                    (record.len() + outcome.steps_used) as u64,
                )
            }
            Curriculum::Fixed(cases) => {
                let (env_seed, events) = &cases[((r - 1) % cases.len() as u64) as usize];
                let initial = GridState::new(grid, *env_seed)?;
                let setup = training_setup(&self.db, self.embedder.as_ref(), &cfg);
                let (outcome, transitions) = run_student_rollout(
                    &mut self.student,
                    &initial,
                    events,
                    &setup,
                    &mut self.rngs.student,
                    &mut self.rngs.instructions,
                )?;
                self.student.replay.extend(transitions);
                (-1, events.len(), outcome.n_reached(), 0.0, outcome.steps_used as u64)
            }
        };
        self.env_steps += steps;
        self.rollout = r;

        if let Curriculum::Teachers { count, .. } = &self.settings.curriculum {
            let k = Self::teacher_for(r, *count);
            if let Some(learner) = self.teachers[k].learner() {
                update_teacher(learner, &cfg, &mut self.rngs.sampling)?;
            }
        }
        let tally = self.update_student(&cfg)?;

        Ok(RolloutMetrics {
            rollout: r,
            teacher_id,
            n_events,
            n_reached,
            teacher_reward_sum: teacher_reward,
            student_reward_sum: cfg.student_reward * n_reached as f64,
            l_rl: tally.mean_rl(),
            l_bc: tally.mean_bc(),
            bc_weight: self.bc_weight,
            epsilon_student: self.student.epsilon(),
            wall_ms: if self.settings.log_wall_time {
                started.elapsed().as_millis() as u64
            } else {
                0
            },
            env_steps: self.env_steps,
            eval_success: None,
        })
    }

    fn update_student(&mut self, cfg: &TrainerConfig) -> Result<LossTally> {
        let mut tally = LossTally::default();
        for _ in 0..cfg.updates_per_rollout {
            let Some(rl) = self.student.sample_rl_loss(cfg, &mut self.rngs.sampling)? else {
                break;
            };
            let rl_loss = finite(rl.loss, "student TD")?;
            tally.rl += rl_loss;
            tally.n_rl += 1;
            let grads = if self.settings.use_bc && !self.bc.is_empty() {
                let items = self.bc.sample(&mut self.rngs.sampling, cfg.batch_size);
                let (x, actions) = self.student.make_bc_batch(&items);
                let bc = bc_loss(&self.student.online, x.view(), &actions)?;
                let bc_value = finite(bc.loss, "behavioural-cloning")?;
                tally.bc += bc_value;
                tally.n_bc += 1;
                let mixed = mix_gradients(&rl.grads, &bc.grads, self.bc_weight as f32);
                self.bc_weight = update_bc_weight(
                    self.bc_weight,
                    rl_loss,
                    bc_value,
                    cfg.bcl_ratio,
                    cfg.bc_weight_rate,
                    cfg.bc_weight_max,
                );
                mixed
            } else {
                rl.grads
            };
            self.student.apply(grads, cfg)?;
        }
        Ok(tally)
    }

    /// Runs until `total_rollouts` or the step budget is exhausted, handing
    /// each rollout's metrics to `observe`.
    pub fn run(&mut self, mut observe: impl FnMut(&Trainer, RolloutMetrics) -> Result<()>) -> Result<()> {
        while !self.is_finished() {
            let m = self.step()?;
            observe(self, m)?;
        }
        Ok(())
    }
}

fn training_setup<'a>(db: &'a SynonymDb, embedder: &'a dyn GoalEmbedder, cfg: &TrainerConfig) -> StudentSetup<'a> {
    StudentSetup {
        db,
        embedder,
        partition: Partition::Train,
        frame_stack: cfg.frame_stack,
        reward: cfg.student_reward,
    }
}

fn update_teacher(agent: &mut D3qnAgent, cfg: &TrainerConfig, rng: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..cfg.updates_per_rollout {
        let Some(rl) = agent.sample_rl_loss(cfg, rng)? else {
            break;
        };
        finite(rl.loss, "teacher TD")?;
        agent.apply(rl.grads, cfg)?;
    }
    Ok(())
}

use ndarray::Array2;
use rand::Rng;

use super::config::{EpsilonSchedule, TrainerConfig};
use super::frames::{encode_input, input_vector, FrameStack};
use super::loss::{argmax, LossOutput, QBatch};
use super::net::{soft_update, NetShape, QNet};
use super::optim::{grad_step, Adam, StepStats};
use super::real::Real;
use super::replay::{BcSample, ReplayBuffer, Transition};
use crate::envgrid::Action;
use crate::error::Result;

/// Epsilon-greedy action: greedy on `net`'s scores with probability
/// `1 - epsilon` (ties to the lowest index), otherwise uniform.
pub fn act<T: Real>(net: &QNet<T>, input: &[T], epsilon: f64, rng: &mut impl Rng) -> Result<Action> {
    let q = net.forward_one(input)?;
    let explore = rng.gen::<f64>() < epsilon;
    let index = if explore {
        rng.gen_range(0..Action::COUNT)
    } else {
        argmax(&q)
    };
    Ok(Action::from_index(index).expect("action index in range"))
}

/// A D3QN learner: online and target networks, optimizer state, replay
/// memory and exploration counters.
#[derive(Clone, Debug, PartialEq)]
pub struct D3qnAgent {
    pub online: QNet<f32>,
    pub target: QNet<f32>,
    pub optimizer: Adam<f32>,
    pub replay: ReplayBuffer<Transition>,
    pub env_steps: u64,
    pub updates: u64,
    schedule: EpsilonSchedule,
    frame_len: usize,
    goal_dim: usize,
}

impl D3qnAgent {
    pub fn new(cfg: &TrainerConfig, goal_dim: usize, rng: &mut impl Rng) -> Result<Self> {
        let frame_len = FrameStack::flat_len(cfg.frame_stack);
        let shape = NetShape::new(frame_len + goal_dim, cfg.hidden.clone(), Action::COUNT)?;
        let online = QNet::new(shape, rng);
        Ok(D3qnAgent {
            target: online.clone(),
            optimizer: Adam::new(online.params().len(), cfg.learning_rate as f32),
            online,
            replay: ReplayBuffer::new(cfg.replay_capacity),
            env_steps: 0,
            updates: 0,
            schedule: cfg.epsilon(),
            frame_len,
            goal_dim,
        })
    }

    /// Rebuilds an agent from saved parts.
    pub fn from_parts(
        cfg: &TrainerConfig,
        goal_dim: usize,
        online: QNet<f32>,
        target: QNet<f32>,
        optimizer: Adam<f32>,
        replay: ReplayBuffer<Transition>,
        env_steps: u64,
        updates: u64,
    ) -> Self {
        D3qnAgent {
            online,
            target,
            optimizer,
            replay,
            env_steps,
            updates,
            schedule: cfg.epsilon(),
            frame_len: FrameStack::flat_len(cfg.frame_stack),
            goal_dim,
        }
    }

    pub fn goal_dim(&self) -> usize {
        self.goal_dim
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn epsilon(&self) -> f64 {
        self.schedule.value(self.env_steps)
    }

    pub fn q_values(&self, frames: &[u8], goal: &[f32]) -> Result<Vec<f32>> {
        self.online.forward_one(&input_vector(frames, goal))
    }

    /// Exploring action; advances the agent's step counter.
    pub fn act_explore(&mut self, frames: &[u8], goal: &[f32], rng: &mut impl Rng) -> Result<Action> {
        let a = act(&self.online, &input_vector(frames, goal), self.epsilon(), rng)?;
        self.env_steps += 1;
        Ok(a)
    }

    pub fn act_greedy(&self, frames: &[u8], goal: &[f32]) -> Result<Action> {
        let q = self.q_values(frames, goal)?;
        Ok(Action::from_index(argmax(&q)).expect("action index in range"))
    }

    fn inputs<'a>(&self, rows: impl ExactSizeIterator<Item = (&'a [u8], &'a [f32])>) -> Array2<f32> {
        let mut x = Array2::zeros((rows.len(), self.frame_len + self.goal_dim));
        for (mut row, (frames, goal)) in x.rows_mut().into_iter().zip(rows) {
            encode_input(frames, goal, row.as_slice_mut().unwrap());
        }
        x
    }

    pub fn make_batch(&self, items: &[&Transition]) -> QBatch<f32> {
        QBatch {
            obs: self.inputs(items.iter().map(|t| (&*t.obs, &*t.goal))),
            actions: items.iter().map(|t| t.action as usize).collect(),
            rewards: items.iter().map(|t| t.reward).collect(),
            next_obs: self.inputs(items.iter().map(|t| (&*t.next_obs, &*t.goal))),
            dones: items.iter().map(|t| t.done).collect(),
        }
    }

    pub fn make_bc_batch(&self, items: &[&BcSample]) -> (Array2<f32>, Vec<usize>) {
        (
            self.inputs(items.iter().map(|s| (&*s.obs, &*s.goal))),
            items.iter().map(|s| s.action as usize).collect(),
        )
    }

    /// TD loss on a fresh minibatch, or `None` while the buffer is still
    /// below `learning_starts`.
    pub fn sample_rl_loss(&self, cfg: &TrainerConfig, rng: &mut impl Rng) -> Result<Option<LossOutput<f32>>> {
        if self.replay.len() < cfg.learning_starts.max(1) {
            return Ok(None);
        }
        let items = self.replay.sample(rng, cfg.batch_size);
        let batch = self.make_batch(&items);
        super::loss::d3qn_loss(&batch, &self.online, &self.target, cfg.discount as f32).map(Some)
    }

    /// Gradient step followed by a soft target update.
    pub fn apply(&mut self, grads: super::loss::Gradients<f32>, cfg: &TrainerConfig) -> Result<StepStats> {
        let stats = grad_step(&mut self.online, grads, &mut self.optimizer, cfg.grad_clip as f32)?;
        soft_update(&self.online, &mut self.target, cfg.tau as f32)?;
        self.updates += 1;
        Ok(stats)
    }
}

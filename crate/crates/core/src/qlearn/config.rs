use serde::{Deserialize, Serialize};

use crate::error::{GlideError, Result};

/// Learning hyperparameters shared by teachers and the student.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    /// Equilibrium ratio between RL and BC loss in the BC weight update.
    pub bcl_ratio: f64,
    pub frame_stack: usize,
    pub grad_clip: f64,
    pub learning_rate: f64,
    pub tau: f64,
    /// Student reward per reached goal (z).
    pub student_reward: f64,
    /// Teacher penalty when no event was triggered (C).
    pub teacher_idle_penalty: f64,
    /// Teacher reward per goal the student failed (y).
    pub teacher_fail_reward: f64,
    /// Teacher penalty per goal the student reached (x).
    pub teacher_reach_penalty: f64,
    pub discount: f64,
    pub bc_weight_init: f64,
    pub bc_weight_rate: f64,
    pub bc_weight_max: f64,
    pub batch_size: usize,
    pub updates_per_rollout: usize,
    pub replay_capacity: usize,
    pub bc_capacity: usize,
    /// Minimum buffered transitions before an agent starts updating.
    pub learning_starts: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    pub hidden: Vec<usize>,
    /// Exploration bonus `scale * decay^f` for an event triggered `f` times before.
    pub bonus_scale: f64,
    pub bonus_decay: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            bcl_ratio: 0.9,
            frame_stack: 8,
            grad_clip: 0.67,
            learning_rate: 5.13e-5,
            tau: 0.098,
            student_reward: 3.0,
            teacher_idle_penalty: 8.0,
            teacher_fail_reward: 6.0,
            teacher_reach_penalty: 2.0,
            discount: 0.99,
            bc_weight_init: 0.1,
            bc_weight_rate: 1e-3,
            bc_weight_max: 10.0,
            batch_size: 64,
            updates_per_rollout: 4,
            replay_capacity: 100_000,
            bc_capacity: 100_000,
            learning_starts: 64,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 50_000,
            hidden: vec![256, 256],
            bonus_scale: 3.0,
            bonus_decay: 0.97,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(GlideError::Config(m.into()));
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return err("discount must lie in (0, 1]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return err("tau must lie in (0, 1]");
        }
        let rewards = [
            self.student_reward,
            self.teacher_idle_penalty,
            self.teacher_fail_reward,
            self.teacher_reach_penalty,
        ];
        if rewards.iter().any(|&r| !(r > 0.0)) {
            return err("reward magnitudes x, y, z, C must be positive");
        }
        if self.teacher_idle_penalty <= self.teacher_fail_reward
            || self.teacher_idle_penalty <= self.teacher_reach_penalty
        {
            return err("C must exceed both x and y");
        }
        if self.frame_stack == 0 || self.batch_size == 0 || self.replay_capacity == 0 || self.bc_capacity == 0 {
            return err("frame_stack, batch_size and buffer capacities must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return err("hidden layer sizes must be positive");
        }
        if !(self.learning_rate > 0.0) || !(self.grad_clip > 0.0) {
            return err("learning_rate and grad_clip must be positive");
        }
        if !(0.0..=1.0).contains(&self.epsilon_start) || !(0.0..=1.0).contains(&self.epsilon_end) {
            return err("epsilon bounds must lie in [0, 1]");
        }
        if self.bc_weight_init < 0.0 || self.bc_weight_max < 0.0 || self.bc_weight_rate < 0.0 {
            return err("BC weight parameters must be non-negative");
        }
        if !(self.bonus_scale >= 0.0) || !(self.bonus_decay > 0.0 && self.bonus_decay <= 1.0) {
            return err("bonus_scale must be >= 0 and bonus_decay in (0, 1]");
        }
        Ok(())
    }

    pub fn epsilon(&self) -> EpsilonSchedule {
        EpsilonSchedule {
            start: self.epsilon_start,
            end: self.epsilon_end,
            decay_steps: self.epsilon_decay_steps,
        }
    }
}

/// Linear exploration decay over an agent's own environment steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: u64,
}

impl EpsilonSchedule {
    pub fn value(&self, step: u64) -> f64 {
        if self.decay_steps == 0 || step >= self.decay_steps {
            return self.end;
        }
        self.start + (self.end - self.start) * (step as f64 / self.decay_steps as f64)
    }
}

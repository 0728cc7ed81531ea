use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::rollout::RolloutRecord;
use crate::embed::GoalEmbedder;
use crate::envgrid::Event;
use crate::error::Result;
use crate::instructor::{sample_instruction, Partition, SynonymDb};
use crate::qlearn::{BcSample, ReplayBuffer, TrainerConfig};

/// How often each event has been triggered by any teacher so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFrequency(BTreeMap<Event, u64>);

impl EventFrequency {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, event: Event) -> u64 {
        self.0.get(&event).copied().unwrap_or(0)
    }

    /// Returns the count before incrementing.
    pub fn bump(&mut self, event: Event) -> u64 {
        let c = self.0.entry(event).or_insert(0);
        *c += 1;
        *c - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (Event, u64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

impl FromIterator<(Event, u64)> for EventFrequency {
    fn from_iter<I: IntoIterator<Item = (Event, u64)>>(iter: I) -> Self {
        EventFrequency(iter.into_iter().filter(|&(_, c)| c > 0).collect())
    }
}

/// Novelty bonus for an event already triggered `count` times.
pub fn exploration_bonus(count: u64, scale: f64, decay: f64) -> f64 {
    scale * decay.powf(count as f64)
}

/// Per-step teacher rewards for one rollout. Each triggered event is
/// credited at its trigger step with `-x` if the student reached it or `+y`
/// otherwise, plus the novelty bonus; an eventless rollout gets `-C` on its
/// last step. Updates `freq`.
pub fn distribute_rewards(
    record: &RolloutRecord,
    reached: &[bool],
    freq: &mut EventFrequency,
    cfg: &TrainerConfig,
) -> Vec<f64> {
    assert_eq!(reached.len(), record.goals.len(), "outcome does not match record");
    let mut rewards = vec![0.0; record.len()];
    if record.goals.is_empty() {
        if let Some(last) = rewards.last_mut() {
            *last = -cfg.teacher_idle_penalty;
        }
        return rewards;
    }
    for (goal, &hit) in record.goals.iter().zip(reached) {
        let base = if hit {
            -cfg.teacher_reach_penalty
        } else {
            cfg.teacher_fail_reward
        };
        let bonus = exploration_bonus(freq.bump(goal.event), cfg.bonus_scale, cfg.bonus_decay);
        rewards[goal.step] += base + bonus;
    }
    rewards
}

/// Clones teacher behaviour toward the goals the student failed. For each
/// failed goal the teacher steps after the previous goal's trigger step up
/// to and including its own are inserted, conditioned on one instruction
/// for that goal. Returns the number of samples inserted.
pub fn fill_bc_buffer(
    record: &RolloutRecord,
    reached: &[bool],
    bc: &mut ReplayBuffer<BcSample>,
    db: &SynonymDb,
    embedder: &dyn GoalEmbedder,
    partition: Partition,
    mut rng: &mut dyn RngCore,
) -> Result<usize> {
    assert_eq!(reached.len(), record.goals.len(), "outcome does not match record");
    let mut inserted = 0;
    let mut start = 0;
    for (goal, &hit) in record.goals.iter().zip(reached) {
        if !hit {
            let instruction = sample_instruction(db, goal.event, &mut rng, partition)?;
            let embedding: Box<[f32]> = embedder.embed(&instruction)?.0.into();
            for step in &record.trace[start..=goal.step] {
                bc.push(BcSample {
                    obs: step.frames.clone(),
                    goal: embedding.clone(),
                    action: step.action.index() as u8,
                });
                inserted += 1;
            }
        }
        start = goal.step + 1;
    }
    Ok(inserted)
}

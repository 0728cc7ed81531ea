//! Natural-language side of the curriculum: event descriptions, imperative
//! instructions, synonym sets with holdout splits, and goal adjudication.

mod db;
pub mod grammar;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envgrid::{Event, EventKind};
use crate::error::{GlideError, Result};
use crate::seed::{rng_for, Stream};

pub use db::{DbHeader, SynonymDb};

/// Instructions per event held out from training.
pub const HOLDOUT: usize = 5;
pub const DEFAULT_SYNONYMS: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: String,
    pub event: Event,
    /// Index into `train ++ holdout` of the event's synonym set.
    pub synonym_index: usize,
}

/// Which part of a synonym set instructions are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Holdout,
    /// Train and holdout together.
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymSet {
    pub event: Event,
    pub root: String,
    pub train: Vec<String>,
    pub holdout: Vec<String>,
}

impl SynonymSet {
    pub fn len(&self) -> usize {
        self.train.len() + self.holdout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Option<&str> {
        if index < self.train.len() {
            Some(&self.train[index])
        } else {
            self.holdout.get(index - self.train.len()).map(String::as_str)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.train.iter().chain(&self.holdout).map(String::as_str)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| GlideError::Format(format!("synonym set for {}: {m}", self.event));
        if self.holdout.len() != HOLDOUT {
            return Err(bad(format!("holdout has {} entries, expected {HOLDOUT}", self.holdout.len())));
        }
        if self.train.is_empty() {
            return Err(bad("train partition is empty".into()));
        }
        if !self.train.contains(&self.root) {
            return Err(bad("root instruction missing from train".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for s in self.iter() {
            if s.trim().is_empty() {
                return Err(bad("empty instruction".into()));
            }
            if !seen.insert(s) {
                return Err(bad(format!("duplicate instruction {s:?}")));
            }
        }
        Ok(())
    }

    fn pick(&self, partition: Partition, rng: &mut impl Rng) -> usize {
        match partition {
            Partition::Train => rng.gen_range(0..self.train.len()),
            Partition::Holdout => self.train.len() + rng.gen_range(0..self.holdout.len()),
            Partition::All => rng.gen_range(0..self.len()),
        }
    }
}

/// Declarative description of what just happened.
pub fn describe(event: Event) -> String {
    match event.kind() {
        EventKind::Facing => format!("you are standing in front of the {} {}", event.color(), event.obj()),
        EventKind::Holding => format!("you have picked up the {} {}", event.color(), event.obj()),
        EventKind::Opened => format!("you have opened the {} door", event.color()),
    }
}

/// Imperative root instruction for an event.
pub fn to_instruction(event: Event) -> String {
    match event.kind() {
        EventKind::Facing => format!("go to the {} {}", event.color(), event.obj()),
        EventKind::Holding => format!("pick up the {} {}", event.color(), event.obj()),
        EventKind::Opened => format!("open the {} door", event.color()),
    }
}

/// Samples `m` distinct grammar expansions for `event`. The root instruction
/// comes first; the last [`HOLDOUT`] samples form the holdout partition.
pub fn gen_synonyms(event: Event, m: usize, seed: u64) -> Result<SynonymSet> {
    if m < HOLDOUT + 1 {
        return Err(GlideError::Capacity(format!(
            "need at least {} synonyms per event, got {m}",
            HOLDOUT + 1
        )));
    }
    let capacity = grammar::capacity(event);
    if m > capacity {
        return Err(GlideError::Capacity(format!(
            "{event} supports at most {capacity} synonyms, asked for {m}"
        )));
    }
    let root = to_instruction(event);
    debug_assert_eq!(grammar::phrase(event, 0), root);
    let mut rest: Vec<usize> = (1..capacity).collect();
    let mut rng = rng_for(seed, Stream::Synonyms, 0);
    rest.shuffle(&mut rng);
    let mut all = Vec::with_capacity(m);
    all.push(root.clone());
    all.extend(rest[..m - 1].iter().map(|&i| grammar::phrase(event, i)));
    let holdout = all.split_off(m - HOLDOUT);
    Ok(SynonymSet {
        event,
        root,
        train: all,
        holdout,
    })
}

/// Draws an instruction for `event` uniformly from `partition`.
pub fn sample_instruction(
    db: &SynonymDb,
    event: Event,
    rng: &mut impl Rng,
    partition: Partition,
) -> Result<Instruction> {
    let set = db.get(event)?;
    let synonym_index = set.pick(partition, rng);
    Ok(Instruction {
        text: set.get(synonym_index).expect("index in range").to_owned(),
        event,
        synonym_index,
    })
}

/// Events the student emitted, grouped by environment step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventTrace {
    steps: Vec<Vec<Event>>,
}

impl EventTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, events: Vec<Event>) {
        self.steps.push(events);
    }

    pub fn steps(&self) -> &[Vec<Event>] {
        &self.steps
    }

    pub fn current(&self) -> &[Event] {
        self.steps.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// All events in emission order.
    pub fn flat(&self) -> impl Iterator<Item = Event> + '_ {
        self.steps.iter().flatten().copied()
    }
}

/// True iff `goal` fired at the most recent step. Uses the same rising-edge
/// events the simulator reports for teachers.
pub fn reached(trace: &EventTrace, goal: Event) -> bool {
    trace.current().contains(&goal)
}

#[cfg(test)]
mod tests;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envgrid::{Action, Event, GridConfig, GridState};
use crate::error::{GlideError, Result};
use crate::seed::{derive_seed, rng_for, Stream};

/// Random-agent horizon and episode count used for the full-size test set.
pub const DEFAULT_STEPS: u32 = 1000;
pub const DEFAULT_EPISODES: usize = 100;

/// A stored initial condition and the events a random agent triggered from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub env_seed: u64,
    pub events: Vec<Event>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSetMeta {
    pub steps: u32,
    pub episodes: usize,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSet {
    pub meta: TestSetMeta,
    pub cases: Vec<TestCase>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: TestSetMeta,
}

/// Events a uniform-random agent triggers in `steps` steps from `env_seed`.
pub fn random_episode(grid: &GridConfig, env_seed: u64, steps: u32) -> Result<Vec<Event>> {
    let mut cfg = *grid;
    cfg.max_steps = steps;
    let mut state = GridState::new(cfg, env_seed)?;
    let mut rng = rng_for(env_seed, Stream::RandomActions, 0);
    let mut events = Vec::new();
    while !state.is_terminal() {
        let a = Action::ALL[rng.gen_range(0..Action::COUNT)];
        events.extend(state.step_mut(a));
    }
    Ok(events)
}

/// Draws `episodes` cases, skipping any episode that triggered nothing and
/// moving on to the next derived seed.
pub fn gen_testset(grid: &GridConfig, master_seed: u64, steps: u32, episodes: usize, config_hash: &str) -> Result<TestSet> {
    grid.validate()?;
    if steps == 0 || episodes == 0 {
        return Err(GlideError::Config("test set needs positive steps and episodes".into()));
    }
    let mut cases = Vec::with_capacity(episodes);
    let mut attempt = 0u64;
    let limit = episodes as u64 * 1000;
    while cases.len() < episodes {
        if attempt >= limit {
            return Err(GlideError::Config(format!(
                "random agent triggered no events in {limit} episodes; the world is too sparse"
            )));
        }
        let env_seed = derive_seed(master_seed, Stream::TestsetEpisode, attempt);
        attempt += 1;
        let events = random_episode(grid, env_seed, steps)?;
        if !events.is_empty() {
            cases.push(TestCase { env_seed, events });
        }
    }
    Ok(TestSet {
        meta: TestSetMeta {
            steps,
            episodes,
            seed: master_seed,
            config_hash: config_hash.to_owned(),
        },
        cases,
    })
}

/// Replays a case with the random agent and compares the event sequence.
pub fn verify_case(grid: &GridConfig, steps: u32, case: &TestCase) -> Result<bool> {
    Ok(random_episode(grid, case.env_seed, steps)? == case.events)
}

impl TestSet {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&HeaderLine {
            header: self.meta.clone(),
        })
        .expect("header serializes");
        out.push('\n');
        for case in &self.cases {
            out.push_str(&serde_json::to_string(case).expect("case serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<TestSet> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| GlideError::Format("test set file is empty".into()))?;
        let meta = serde_json::from_str::<HeaderLine>(first)
            .map_err(|e| GlideError::Format(format!("test set header: {e}")))?
            .header;
        let mut cases = Vec::new();
        for (n, line) in lines {
            let case: TestCase = serde_json::from_str(line)
                .map_err(|e| GlideError::Format(format!("test set line {}: {e}", n + 1)))?;
            if case.events.is_empty() {
                return Err(GlideError::Format(format!("test set line {} has no events", n + 1)));
            }
            cases.push(case);
        }
        Ok(TestSet { meta, cases })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| GlideError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<TestSet> {
        let text = std::fs::read_to_string(path).map_err(|e| GlideError::io(path, e))?;
        TestSet::from_jsonl(&text)
    }

    /// (env seed, events) pairs for a fixed curriculum.
    pub fn as_curriculum(&self) -> Vec<(u64, Vec<Event>)> {
        self.cases.iter().map(|c| (c.env_seed, c.events.clone())).collect()
    }
}

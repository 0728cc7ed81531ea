use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::testset::{TestCase, TestSet};
use crate::embed::GoalEmbedder;
use crate::envgrid::{GridConfig, GridState};
use crate::error::{GlideError, Result};
use crate::instructor::{Partition, SynonymDb};
use crate::orchestrator::{run_student_rollout, Greedy, Policy, QFunction, StudentOutcome, StudentSetup};
use crate::qlearn::FrameStack;
use crate::seed::rng_for;
use crate::seed::Stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    TrainSynonyms,
    HoldoutSynonyms,
    OneHot,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::TrainSynonyms => "train_synonyms",
            EvalMode::HoldoutSynonyms => "holdout_synonyms",
            EvalMode::OneHot => "onehot",
        }
    }

    pub fn partition(self) -> Partition {
        match self {
            EvalMode::HoldoutSynonyms => Partition::Holdout,
            _ => Partition::Train,
        }
    }
}

impl FromStr for EvalMode {
    type Err = GlideError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train_synonyms" => Ok(EvalMode::TrainSynonyms),
            "holdout_synonyms" => Ok(EvalMode::HoldoutSynonyms),
            "onehot" => Ok(EvalMode::OneHot),
            _ => Err(GlideError::Config(format!(
                "unknown eval mode {s:?}; expected train_synonyms, holdout_synonyms or onehot"
            ))),
        }
    }
}

/// Everything an evaluation pass needs besides the student.
#[derive(Clone, Copy)]
pub struct EvalSetup<'a> {
    /// World parameters; `max_steps` is the student's budget per case.
    pub grid: GridConfig,
    pub db: &'a SynonymDb,
    pub embedder: &'a dyn GoalEmbedder,
    pub mode: EvalMode,
    pub frame_stack: usize,
    /// Seed for instruction sampling.
    pub seed: u64,
    pub workers: usize,
}

impl EvalSetup<'_> {
    /// Rejects mode/embedder combinations that make no sense.
    pub fn validate(&self) -> Result<()> {
        match (self.mode, self.embedder.reads_text()) {
            (EvalMode::OneHot, true) => Err(GlideError::Config(format!(
                "onehot mode needs an event-level embedder, got {}",
                self.embedder.name()
            ))),
            (EvalMode::HoldoutSynonyms, false) => Err(GlideError::Config(
                "one-hot goals ignore instruction text, so holdout synonyms cannot be evaluated".into(),
            )),
            (EvalMode::TrainSynonyms, false) => Err(GlideError::Config(
                "embedder ignores instruction text; use onehot mode".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Checks that a Q-function accepts this setup's input width.
    pub fn check_input(&self, q: &dyn QFunction) -> Result<()> {
        let expected = FrameStack::flat_len(self.frame_stack) + self.embedder.dim();
        if q.input_dim() != expected {
            return Err(GlideError::Config(format!(
                "checkpoint expects input width {}, frame stack {} with {} goal dims gives {expected}",
                q.input_dim(),
                self.frame_stack,
                self.embedder.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub index: usize,
    pub success: bool,
    pub events_reached: usize,
    pub events_total: usize,
    pub steps_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub cases: Vec<CaseResult>,
}

impl EvalReport {
    pub fn success_rate(&self) -> f64 {
        if self.cases.is_empty() {
            return 0.0;
        }
        self.cases.iter().filter(|c| c.success).count() as f64 / self.cases.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,success,events_reached,events_total,steps_used\n");
        for c in &self.cases {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.index, c.success as u8, c.events_reached, c.events_total, c.steps_used
            ));
        }
        out
    }
}

/// Runs one case with `policy`. Instruction sampling is seeded by the case
/// index, so results do not depend on evaluation order.
pub fn eval_case(
    policy: &mut dyn Policy,
    case: &TestCase,
    index: usize,
    setup: &EvalSetup<'_>,
) -> Result<(CaseResult, StudentOutcome)> {
    let initial = GridState::new(setup.grid, case.env_seed)?;
    let student = StudentSetup {
        db: setup.db,
        embedder: setup.embedder,
        partition: setup.mode.partition(),
        frame_stack: setup.frame_stack,
        reward: 0.0,
    };
    let mut act_rng = rng_for(setup.seed, Stream::Eval, 2 * index as u64);
    let mut instr_rng = rng_for(setup.seed, Stream::Eval, 2 * index as u64 + 1);
    let (outcome, _) = run_student_rollout(policy, &initial, &case.events, &student, &mut act_rng, &mut instr_rng)?;
    let result = CaseResult {
        index,
        success: outcome.success(),
        events_reached: outcome.n_reached(),
        events_total: case.events.len(),
        steps_used: outcome.steps_used,
    };
    Ok((result, outcome))
}

/// Greedy evaluation of `q` over every case, optionally in parallel.
pub fn eval_outcomes(
    q: &dyn QFunction,
    testset: &TestSet,
    setup: &EvalSetup<'_>,
) -> Result<Vec<(CaseResult, StudentOutcome)>> {
    setup.validate()?;
    setup.check_input(q)?;
    let run = |(i, case): (usize, &TestCase)| eval_case(&mut Greedy(q), case, i, setup);
    if setup.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(setup.workers)
            .build()
            .map_err(|e| GlideError::Config(format!("cannot start {} eval workers: {e}", setup.workers)))?;
        pool.install(|| testset.cases.par_iter().enumerate().map(run).collect())
    } else {
        testset.cases.iter().enumerate().map(run).collect()
    }
}

pub fn eval_success(q: &dyn QFunction, testset: &TestSet, setup: &EvalSetup<'_>) -> Result<EvalReport> {
    let cases = eval_outcomes(q, testset, setup)?.into_iter().map(|(c, _)| c).collect();
    Ok(EvalReport {
        mode: setup.mode,
        cases,
    })
}

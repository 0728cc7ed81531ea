//! Random-agent test sets, in-order success evaluation and the
//! Q-value versus instruction-distance analysis.

mod qdist;
mod success;
mod testset;

pub use qdist::{ols_slope, q_distance_analysis, QDistancePoint, QDistanceReport};
pub use success::{eval_case, eval_outcomes, eval_success, CaseResult, EvalMode, EvalReport, EvalSetup};
pub use testset::{
    gen_testset, random_episode, verify_case, TestCase, TestSet, TestSetMeta, DEFAULT_EPISODES, DEFAULT_STEPS,
};

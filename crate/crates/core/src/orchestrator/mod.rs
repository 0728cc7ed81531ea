//! The teacher/student loop: teacher rollouts, goal-queue student rollouts,
//! adversarial reward distribution, behavioural-cloning buffer filling and
//! agent updates.

mod checkpoint;
mod metrics;
mod policy;
mod rewards;
mod rollout;
mod train;

pub use checkpoint::{load_student_net, save_student_net, teacher_file, RUN_STATE, STUDENT_FILE};
pub use metrics::{MetricsWriter, RolloutMetrics, METRICS_HEADER};
pub use policy::{ActContext, Greedy, Policy, PolicyMaker, PolicyRegistry, QFunction, RandomPolicy, Scripted};
pub use rewards::{distribute_rewards, exploration_bonus, fill_bc_buffer, EventFrequency};
pub use rollout::{
    run_student_for, run_student_rollout, run_teacher_from, run_teacher_rollout, GoalOccurrence, RolloutRecord, StudentOutcome,
    StudentSetup, TeacherStep,
};
pub use train::{Curriculum, TrainSettings, Trainer, TrainerRngs};

#[cfg(test)]
mod tests;

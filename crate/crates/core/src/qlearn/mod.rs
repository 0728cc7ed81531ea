//! Dueling double deep Q-learning: network, losses, optimizer, replay and
//! frame stacking, shared by teachers and the student.

mod agent;
mod config;
mod frames;
mod loss;
mod net;
mod optim;
mod real;
mod replay;

pub use agent::{act, D3qnAgent};
pub use config::{EpsilonSchedule, TrainerConfig};
pub use frames::{encode_input, input_vector, FrameStack};
pub use loss::{
    argmax, bc_loss, d3qn_loss, double_dqn_target, mix_gradients, q_regression_loss, softmax_cross_entropy,
    td_targets, total_student_loss, update_bc_weight, Gradients, LossOutput, QBatch,
};
pub use net::{dueling_combine, soft_update, NetShape, QNet, Trace};
pub use optim::{clip_global_norm, grad_step, Adam, StepStats};
pub use real::Real;
pub use replay::{BcSample, ReplayBuffer, Transition};

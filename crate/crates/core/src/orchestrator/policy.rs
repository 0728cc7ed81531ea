use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::envgrid::{Action, Event, GridState};
use crate::error::{GlideError, Result};
use crate::qlearn::{argmax, input_vector, D3qnAgent, QNet, TrainerConfig};

/// What an acting agent gets to see at one step. Learned agents only read
/// `frames` and `goal_embedding`; scripted agents may inspect the state.
pub struct ActContext<'a> {
    pub state: &'a GridState,
    pub frames: &'a [u8],
    pub goal: Option<Event>,
    pub goal_embedding: &'a [f32],
}

/// An acting agent (teacher or student).
pub trait Policy: Send {
    fn name(&self) -> &str;

    fn act(&mut self, ctx: &ActContext<'_>, rng: &mut dyn RngCore) -> Result<Action>;

    fn epsilon(&self) -> f64 {
        0.0
    }

    /// The trainable agent behind this policy, if any.
    fn learner(&mut self) -> Option<&mut D3qnAgent> {
        None
    }

    fn learner_ref(&self) -> Option<&D3qnAgent> {
        None
    }
}

impl Policy for D3qnAgent {
    fn name(&self) -> &str {
        "d3qn"
    }

    fn act(&mut self, ctx: &ActContext<'_>, mut rng: &mut dyn RngCore) -> Result<Action> {
        self.act_explore(ctx.frames, ctx.goal_embedding, &mut rng)
    }

    fn epsilon(&self) -> f64 {
        D3qnAgent::epsilon(self)
    }

    fn learner(&mut self) -> Option<&mut D3qnAgent> {
        Some(self)
    }

    fn learner_ref(&self) -> Option<&D3qnAgent> {
        Some(self)
    }
}

/// Uniformly random actions.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, _: &ActContext<'_>, rng: &mut dyn RngCore) -> Result<Action> {
        Ok(Action::ALL[rng.gen_range(0..Action::COUNT)])
    }

    fn epsilon(&self) -> f64 {
        1.0
    }
}

/// Replays a fixed action sequence, then issues `done` forever.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scripted {
    actions: Vec<Action>,
    cursor: usize,
}

impl Scripted {
    pub fn new(actions: Vec<Action>) -> Self {
        Scripted { actions, cursor: 0 }
    }
}

impl Policy for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn act(&mut self, _: &ActContext<'_>, _: &mut dyn RngCore) -> Result<Action> {
        let a = self.actions.get(self.cursor).copied().unwrap_or(Action::Done);
        self.cursor += 1;
        Ok(a)
    }
}

/// Anything that scores the seven actions for stacked frames plus a goal.
pub trait QFunction: Sync {
    fn input_dim(&self) -> usize;

    fn q_values(&self, frames: &[u8], goal: &[f32]) -> Result<Vec<f32>>;
}

impl QFunction for QNet<f32> {
    fn input_dim(&self) -> usize {
        QNet::input_dim(self)
    }

    fn q_values(&self, frames: &[u8], goal: &[f32]) -> Result<Vec<f32>> {
        self.forward_one(&input_vector(frames, goal))
    }
}

/// Deterministic greedy policy over a Q-function (evaluation mode).
pub struct Greedy<'a, Q: ?Sized>(pub &'a Q);

impl<Q: QFunction + ?Sized> Policy for Greedy<'_, Q> {
    fn name(&self) -> &str {
        "greedy"
    }

    fn act(&mut self, ctx: &ActContext<'_>, _: &mut dyn RngCore) -> Result<Action> {
        let q = self.0.q_values(ctx.frames, ctx.goal_embedding)?;
        Ok(Action::from_index(argmax(&q)).expect("action index in range"))
    }
}

pub type PolicyMaker = fn(&TrainerConfig, usize, &mut dyn RngCore) -> Result<Box<dyn Policy>>;

/// Name-keyed constructors for teacher/student policies.
#[derive(Clone)]
pub struct PolicyRegistry {
    makers: BTreeMap<String, PolicyMaker>,
}

impl PolicyRegistry {
    pub fn builtin() -> Self {
        let mut r = PolicyRegistry {
            makers: BTreeMap::new(),
        };
        r.register("d3qn", |cfg, goal_dim, mut rng| {
            Ok(Box::new(D3qnAgent::new(cfg, goal_dim, &mut rng)?))
        });
        r.register("random", |_, _, _| Ok(Box::new(RandomPolicy)));
        r
    }

    pub fn register(&mut self, name: &str, maker: PolicyMaker) -> &mut Self {
        self.makers.insert(name.to_owned(), maker);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.makers.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, cfg: &TrainerConfig, goal_dim: usize, rng: &mut dyn RngCore) -> Result<Box<dyn Policy>> {
        let maker = self.makers.get(name).ok_or_else(|| {
            GlideError::Config(format!(
                "unknown policy {name:?}; known: {}",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        maker(cfg, goal_dim, rng)
    }
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

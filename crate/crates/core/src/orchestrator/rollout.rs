use rand::RngCore;
use serde::Serialize;

use super::policy::{ActContext, Policy};
use crate::embed::GoalEmbedder;
use crate::envgrid::{Event, GridConfig, GridState};
use crate::error::{GlideError, Result};
use crate::instructor::{sample_instruction, EventTrace, Instruction, Partition, SynonymDb};
use crate::qlearn::{FrameStack, Transition};

/// One teacher step: the state and stacked frames the action was chosen
/// from, the action, and the events it triggered.
#[derive(Clone, Debug, PartialEq)]
pub struct TeacherStep {
    pub state: GridState,
    pub frames: Box<[u8]>,
    pub action: crate::envgrid::Action,
    pub events: Vec<Event>,
}

/// A triggered event and the index of the step that triggered it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GoalOccurrence {
    pub event: Event,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RolloutRecord {
    pub teacher_id: usize,
    pub env_seed: u64,
    pub initial_state: GridState,
    pub trace: Vec<TeacherStep>,
    /// Frames after the last step.
    pub final_frames: Box<[u8]>,
    /// Events in trigger order; repeats allowed.
    pub goals: Vec<GoalOccurrence>,
}

impl RolloutRecord {
    pub fn goal_events(&self) -> Vec<Event> {
        self.goals.iter().map(|g| g.event).collect()
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    /// Frames observed after step `t`.
    pub fn next_frames(&self, t: usize) -> &[u8] {
        match self.trace.get(t + 1) {
            Some(s) => &s.frames,
            None => &self.final_frames,
        }
    }

    /// Teacher replay transitions given per-step rewards. Only the final
    /// step is terminal; teachers see no goal input.
    pub fn teacher_transitions(&self, rewards: &[f64]) -> Vec<Transition> {
        assert_eq!(rewards.len(), self.trace.len());
        let last = self.trace.len().saturating_sub(1);
        self.trace
            .iter()
            .enumerate()
            .map(|(t, s)| Transition {
                obs: s.frames.clone(),
                goal: Box::new([]),
                action: s.action.index() as u8,
                reward: rewards[t] as f32,
                next_obs: self.next_frames(t).into(),
                done: t == last,
            })
            .collect()
    }
}

fn start_frames(state: &GridState, k: usize) -> FrameStack {
    let mut frames = FrameStack::new(k);
    frames.push(&state.observe());
    frames
}

/// Runs a teacher for a full episode (`grid.max_steps` steps) from the
/// environment built from `env_seed`.
pub fn run_teacher_rollout(
    teacher: &mut dyn Policy,
    teacher_id: usize,
    grid: &GridConfig,
    env_seed: u64,
    frame_stack: usize,
    rng: &mut dyn RngCore,
) -> Result<RolloutRecord> {
    let initial = GridState::new(*grid, env_seed)?;
    run_teacher_from(teacher, teacher_id, env_seed, initial, frame_stack, rng)
}

/// Runs a teacher from an explicit initial state until the episode ends.
pub fn run_teacher_from(
    teacher: &mut dyn Policy,
    teacher_id: usize,
    env_seed: u64,
    initial_state: GridState,
    frame_stack: usize,
    rng: &mut dyn RngCore,
) -> Result<RolloutRecord> {
    let remaining = initial_state.config().max_steps.saturating_sub(initial_state.step_count());
    let mut state = initial_state.clone();
    let mut frames = start_frames(&state, frame_stack);
    let mut trace = Vec::with_capacity(remaining as usize);
    let mut goals = Vec::new();
    while !state.is_terminal() {
        let obs = frames.to_boxed();
        let ctx = ActContext {
            state: &state,
            frames: &obs,
            goal: None,
            goal_embedding: &[],
        };
        let action = teacher.act(&ctx, rng)?;
        let before = state.clone();
        let events = state.step_mut(action);
        frames.push(&state.observe());
        let t = trace.len();
        goals.extend(events.iter().map(|&event| GoalOccurrence { event, step: t }));
        trace.push(TeacherStep {
            state: before,
            frames: obs,
            action,
            events,
        });
    }
    Ok(RolloutRecord {
        teacher_id,
        env_seed,
        initial_state,
        trace,
        final_frames: frames.to_boxed(),
        goals,
    })
}

/// Student-side settings shared by training and evaluation.
#[derive(Clone, Copy)]
pub struct StudentSetup<'a> {
    pub db: &'a SynonymDb,
    pub embedder: &'a dyn GoalEmbedder,
    pub partition: Partition,
    pub frame_stack: usize,
    /// Reward per reached goal.
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudentOutcome {
    pub goals: Vec<Event>,
    pub reached: Vec<bool>,
    /// Step index at which each goal was reached.
    pub reach_steps: Vec<Option<usize>>,
    /// Instruction presented for each goal; `None` for goals never presented.
    pub instructions: Vec<Option<Instruction>>,
    pub steps_used: usize,
    pub initial_state: GridState,
    pub trace: EventTrace,
    /// Goal index the student was conditioned on at each step.
    pub conditioned_on: Vec<usize>,
    /// Stacked frames in which the goal-completing action was chosen.
    pub reach_frames: Vec<Option<Box<[u8]>>>,
}

impl StudentOutcome {
    pub fn n_reached(&self) -> usize {
        self.reached.iter().filter(|&&r| r).count()
    }

    /// All goals reached in order. Vacuously true with no goals.
    pub fn success(&self) -> bool {
        self.reached.iter().all(|&r| r)
    }

    pub fn reward_sum(&self, per_goal: f64) -> f64 {
        per_goal * self.n_reached() as f64
    }
}

/// Runs the student on `goals` in queue order from `initial`. The goal at the
/// head of the queue is embedded and appended to the stacked observation;
/// when it fires the step is rewarded and terminal, and the next goal gets a
/// fresh instruction. Several goals can complete on one step if the step's
/// events contain them in queue order.
pub fn run_student_rollout(
    student: &mut dyn Policy,
    initial: &GridState,
    goals: &[Event],
    setup: &StudentSetup<'_>,
    act_rng: &mut dyn RngCore,
    instr_rng: &mut dyn RngCore,
) -> Result<(StudentOutcome, Vec<Transition>)> {
    let n = goals.len();
    let mut out = StudentOutcome {
        goals: goals.to_vec(),
        reached: vec![false; n],
        reach_steps: vec![None; n],
        instructions: vec![None; n],
        steps_used: 0,
        initial_state: initial.clone(),
        trace: EventTrace::new(),
        conditioned_on: Vec::new(),
        reach_frames: vec![None; n],
    };
    let mut transitions = Vec::new();
    if n == 0 {
        return Ok((out, transitions));
    }
    let mut state = initial.clone();
    let mut frames = start_frames(&state, setup.frame_stack);
    let mut head = 0;
    let mut goal_vec = present(setup, goals[0], instr_rng, &mut out.instructions[0])?;
    while head < n && !state.is_terminal() {
        let ctx = ActContext {
            state: &state,
            frames: frames.as_slice(),
            goal: Some(goals[head]),
            goal_embedding: &goal_vec,
        };
        let action = student.act(&ctx, act_rng)?;
        let obs = frames.to_boxed();
        let events = state.step_mut(action);
        frames.push(&state.observe());
        let t = out.steps_used;
        out.steps_used += 1;
        out.conditioned_on.push(head);

        let mut hits = 0;
        for e in &events {
            if head + hits < n && *e == goals[head + hits] {
                let i = head + hits;
                out.reached[i] = true;
                out.reach_steps[i] = Some(t);
                out.reach_frames[i] = Some(obs.clone());
                hits += 1;
            }
        }
        out.trace.record(events);
        let done = hits > 0 || state.is_terminal();
        transitions.push(Transition {
            obs,
            goal: goal_vec.clone().into_boxed_slice(),
            action: action.index() as u8,
            reward: (setup.reward * hits as f64) as f32,
            next_obs: frames.to_boxed(),
            done,
        });
        if hits > 0 {
            head += hits;
            if head < n {
                goal_vec = present(setup, goals[head], instr_rng, &mut out.instructions[head])?;
            }
        }
    }
    Ok((out, transitions))
}

fn present(
    setup: &StudentSetup<'_>,
    event: Event,
    rng: &mut dyn RngCore,
    slot: &mut Option<Instruction>,
) -> Result<Vec<f32>> {
    let mut rng = rng;
    let instruction = sample_instruction(setup.db, event, &mut rng, setup.partition)?;
    let e = setup.embedder.embed(&instruction)?;
    *slot = Some(instruction);
    Ok(e.0)
}

/// Student rollout on a teacher's goals from the same initial conditions.
pub fn run_student_for(
    student: &mut dyn Policy,
    record: &RolloutRecord,
    setup: &StudentSetup<'_>,
    act_rng: &mut dyn RngCore,
    instr_rng: &mut dyn RngCore,
) -> Result<(StudentOutcome, Vec<Transition>)> {
    let config = *record.initial_state.config();
    let initial = GridState::new(config, record.env_seed)?;
    if initial != record.initial_state {
        return Err(GlideError::Training(format!(
            "environment seed {} did not rebuild the teacher's initial state",
            record.env_seed
        )));
    }
    run_student_rollout(student, &initial, &record.goal_events(), setup, act_rng, instr_rng)
}

#![allow(dead_code)]

use std::collections::BTreeMap;

use glide_core::embed::{onehot, OneHotEmbedder};
use glide_core::envgrid::{Action, Cell, Color, Direction, DoorState, Event, EventKind, EventMask, GridConfig, GridState, ObjKind};
use glide_core::instructor::{Partition, SynonymDb};
use glide_core::orchestrator::{
    distribute_rewards, fill_bc_buffer, run_student_for, run_teacher_rollout, EventFrequency, RolloutRecord, Scripted,
    StudentOutcome, StudentSetup,
};
use glide_core::qlearn::{ReplayBuffer, TrainerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Faced coordinates computed from the pose alone.
fn faced(state: &GridState) -> Option<usize> {
    let (r, c) = state.agent_pos();
    let (r, c) = match state.agent_dir() {
        Direction::N => (r as isize - 1, c as isize),
        Direction::S => (r as isize + 1, c as isize),
        Direction::E => (r as isize, c as isize + 1),
        Direction::W => (r as isize, c as isize - 1),
    };
    let side = state.side() as isize;
    (r >= 0 && c >= 0 && r < side && c < side).then(|| (r * side + c) as usize)
}

fn faces(state: &GridState, color: Color, obj: ObjKind) -> bool {
    let Some(i) = faced(state) else { return false };
    match state.cells()[i] {
        Cell::Door { color: c, .. } => obj == ObjKind::Door && c == color,
        Cell::Object { kind, color: c } => kind == obj && c == color,
        _ => false,
    }
}

fn opened_by_toggle(prev: &GridState, next: &GridState, action: Action, color: Color) -> bool {
    action == Action::Toggle
        && prev.cells().iter().zip(next.cells()).any(|(a, b)| {
            matches!(a, Cell::Door { color: c, state: DoorState::Closed | DoorState::Locked } if *c == color)
                && matches!(b, Cell::Door { color: c, state: DoorState::Open } if *c == color)
        })
}

/// Brute-force event oracle: evaluates every vocabulary predicate on both
/// states by scanning the grid and reports the rising edges, ordered OPENED,
/// HOLDING, FACING.
pub fn oracle_events(prev: &GridState, next: &GridState, action: Action, mask: EventMask) -> Vec<Event> {
    let mut out = Vec::new();
    for kind in [EventKind::Opened, EventKind::Holding, EventKind::Facing] {
        if !mask.allows(kind) {
            continue;
        }
        for event in Event::vocabulary().into_iter().filter(|e| e.kind() == kind) {
            let (c, o) = (event.color(), event.obj());
            let fired = match kind {
                EventKind::Facing => faces(next, c, o) && !faces(prev, c, o),
                EventKind::Holding => next.carried() == Some((c, o)) && prev.carried() != Some((c, o)),
                EventKind::Opened => opened_by_toggle(prev, next, action, c),
            };
            if fired {
                out.push(event);
            }
        }
    }
    out
}

/// Multiset of portable objects on the floor or carried, plus door colors.
pub fn census(state: &GridState) -> BTreeMap<(u8, u8), usize> {
    let mut m = BTreeMap::new();
    for cell in state.cells() {
        let key = match *cell {
            Cell::Object { kind, color } => (kind as u8, color.id()),
            Cell::Door { color, .. } => (ObjKind::Door as u8, color.id()),
            _ => continue,
        };
        *m.entry(key).or_insert(0) += 1;
    }
    if let Some((color, kind)) = state.carried() {
        *m.entry((kind as u8, color.id())).or_insert(0) += 1;
    }
    m
}

/// Action distribution biased toward interactions so that doors, pickups
/// and drops are exercised often.
pub fn busy_action(rng: &mut impl Rng) -> Action {
    const WEIGHTED: [Action; 12] = [
        Action::TurnLeft,
        Action::TurnRight,
        Action::MoveForward,
        Action::MoveForward,
        Action::MoveForward,
        Action::MoveForward,
        Action::Pickup,
        Action::Pickup,
        Action::Drop,
        Action::Toggle,
        Action::Toggle,
        Action::Done,
    ];
    WEIGHTED[rng.gen_range(0..WEIGHTED.len())]
}

/// The reduced world used for the learning checks: one 5x5 room with a
/// ball, a box and a key, reporting FACING events only.
pub fn smoke_grid() -> GridConfig {
    GridConfig {
        rooms_per_side: 1,
        room_interior: 5,
        n_balls: 1,
        n_boxes: 1,
        n_keys: 1,
        events: EventMask::parse_list("FACING").unwrap(),
        ..GridConfig::default()
    }
}

fn walk_worlds() -> Vec<GridConfig> {
    let two = GridConfig {
        rooms_per_side: 2,
        room_interior: 4,
        n_balls: 2,
        n_boxes: 2,
        n_keys: 4,
        locked_door_fraction: 0.5,
        ..GridConfig::default()
    };
    let facing_only = GridConfig {
        events: EventMask::parse_list("FACING,OPENED").unwrap(),
        ..two
    };
    vec![GridConfig::default(), two, facing_only, smoke_grid()]
}

/// Runs `steps` random actions, resetting at episode ends, and compares every
/// step against `check`.
pub fn random_walk(steps: usize, seed: u64, mut check: impl FnMut(&GridState, &GridState, Action, &[Event])) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = walk_worlds();
    let mut episode = 0u64;
    let mut state = GridState::new(configs[0], seed).unwrap();
    for _ in 0..steps {
        if state.is_terminal() {
            episode += 1;
            let cfg = configs[episode as usize % configs.len()];
            state = GridState::new(cfg, seed.wrapping_mul(1_000_003).wrapping_add(episode)).unwrap();
        }
        let action = busy_action(&mut rng);
        let (next, events) = state.step(action);
        check(&state, &next, action, &events);
        state = next;
    }
}

fn protocol_worlds() -> [GridConfig; 3] {
    let small = GridConfig {
        max_steps: 40,
        ..smoke_grid()
    };
    let two = GridConfig {
        rooms_per_side: 2,
        room_interior: 3,
        n_balls: 2,
        n_boxes: 1,
        n_keys: 2,
        max_steps: 60,
        ..GridConfig::default()
    };
    [small, two, GridConfig::default()]
}

/// Teacher actions, then a student copy of them with each step replaced by a
/// random action with probability `noise`.
fn scripts(rng: &mut ChaCha8Rng, len: usize, noise: f64) -> (Vec<Action>, Vec<Action>) {
    let teacher: Vec<Action> = (0..len).map(|_| busy_action(rng)).collect();
    let student = teacher
        .iter()
        .map(|&a| if rng.gen::<f64>() < noise { busy_action(rng) } else { a })
        .collect();
    (teacher, student)
}

fn check_student_queue(record: &RolloutRecord, outcome: &StudentOutcome, actions: &[Action]) {
    let goals = record.goal_events();
    assert_eq!(outcome.goals, goals);
    assert_eq!(outcome.initial_state, record.initial_state);

    // Replay the student's own actions and walk the goal queue by hand.
    let mut state = record.initial_state.clone();
    let mut head = 0;
    let mut reach_steps = vec![None; goals.len()];
    for (t, step_events) in outcome.trace.steps().iter().enumerate() {
        assert_eq!(outcome.conditioned_on[t], head, "student saw the wrong goal at step {t}");
        let events = state.step_mut(actions[t]);
        assert_eq!(&events, step_events);
        for e in &events {
            if head < goals.len() && *e == goals[head] {
                reach_steps[head] = Some(t);
                head += 1;
            }
        }
    }
    assert_eq!(outcome.reach_steps, reach_steps);
    let reached: Vec<bool> = (0..goals.len()).map(|i| i < head).collect();
    assert_eq!(outcome.reached, reached);
    // Stops as soon as the queue empties or the episode ends.
    assert!(head == goals.len() || state.is_terminal());
    for (i, instr) in outcome.instructions.iter().enumerate() {
        assert_eq!(instr.is_some(), i <= head && i < goals.len(), "goal {i} presentation");
        if let Some(instr) = instr {
            assert_eq!(instr.event, goals[i]);
        }
    }
}

/// Plays `rollouts` scripted teacher/student rollouts and checks goal-queue
/// order, student rewards, teacher reward reconciliation, BC insertion and
/// shared initial states against hand-computed expectations. Panics on the
/// first violation; returns how many rollouts were idle, partially reached
/// and fully reached.
pub fn check_protocol(rollouts: usize) -> (usize, usize, usize) {
    let db = SynonymDb::generate(10, 3).unwrap();
    let embedder = OneHotEmbedder;
    let cfg = TrainerConfig {
        frame_stack: 2,
        ..TrainerConfig::default()
    };
    let setup = StudentSetup {
        db: &db,
        embedder: &embedder,
        partition: Partition::Train,
        frame_stack: cfg.frame_stack,
        reward: cfg.student_reward,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut freq = EventFrequency::new();
    let mut seen = std::collections::BTreeMap::new();
    let (mut idle, mut partial, mut full) = (0, 0, 0);

    for i in 0..rollouts {
        let grid = protocol_worlds()[i % 3];
        let noise = [0.0, 0.1, 0.5, 1.0][i % 4];
        let (teacher_actions, student_actions) = scripts(&mut rng, grid.max_steps as usize, noise);
        let env_seed = rng.gen();
        let record = run_teacher_rollout(
            &mut Scripted::new(teacher_actions.clone()),
            0,
            &grid,
            env_seed,
            cfg.frame_stack,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.initial_state, GridState::new(grid, env_seed).unwrap());
        let actions: Vec<Action> = record.trace.iter().map(|s| s.action).collect();
        assert_eq!(actions, teacher_actions);

        let (outcome, transitions) = run_student_for(
            &mut Scripted::new(student_actions.clone()),
            &record,
            &setup,
            &mut rng.clone(),
            &mut rng,
        )
        .unwrap();
        check_student_queue(&record, &outcome, &student_actions);
        if noise == 0.0 {
            assert!(outcome.success(), "a perfect copy of the teacher must reach every goal");
        }

        // Student rewards: z per reached goal, terminal exactly on hits or at the horizon.
        let z = cfg.student_reward;
        assert_eq!(transitions.len(), outcome.steps_used);
        let total: f64 = transitions.iter().map(|t| t.reward as f64).sum();
        assert_eq!(total, z * outcome.n_reached() as f64);
        for (t, tr) in transitions.iter().enumerate() {
            let hit = outcome.reach_steps.contains(&Some(t));
            assert_eq!(tr.done, hit || t + 1 == outcome.initial_state.config().max_steps as usize);
            assert_eq!(tr.reward > 0.0, hit);
        }

        // Teacher rewards reconcile against an independent ledger.
        let rewards = distribute_rewards(&record, &outcome.reached, &mut freq, &cfg);
        assert_eq!(rewards.len(), record.len());
        let mut expected = vec![0.0; record.len()];
        if record.goals.is_empty() {
            *expected.last_mut().unwrap() = -cfg.teacher_idle_penalty;
            idle += 1;
        }
        for (g, &hit) in record.goals.iter().zip(&outcome.reached) {
            let count = seen.entry(g.event).or_insert(0u64);
            let base = if hit { -cfg.teacher_reach_penalty } else { cfg.teacher_fail_reward };
            expected[g.step] += base + cfg.bonus_scale * cfg.bonus_decay.powi(*count as i32);
            *count += 1;
        }
        for (&e, &n) in &seen {
            assert_eq!(freq.get(e), n);
        }
        for (a, b) in rewards.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9, "{rewards:?} vs {expected:?}");
        }
        let teacher_tr = record.teacher_transitions(&rewards);
        assert!(teacher_tr.iter().rev().skip(1).all(|t| !t.done));
        assert!(teacher_tr.last().unwrap().done);
        assert!(teacher_tr.iter().all(|t| t.goal.is_empty()));

        // BC insertion covers exactly the failed goals' segments.
        let mut bc = ReplayBuffer::new(100_000);
        let inserted = fill_bc_buffer(&record, &outcome.reached, &mut bc, &db, &embedder, Partition::Train, &mut rng).unwrap();
        let mut want = Vec::new();
        let mut start = 0;
        for (g, &hit) in record.goals.iter().zip(&outcome.reached) {
            if !hit {
                let goal = onehot(g.event).unwrap().0;
                for step in &record.trace[start..=g.step] {
                    want.push((step.frames.clone(), goal.clone(), step.action.index() as u8));
                }
            }
            start = g.step + 1;
        }
        assert_eq!(inserted, want.len());
        let got: Vec<_> = bc.iter().map(|s| (s.obs.clone(), s.goal.to_vec(), s.action)).collect();
        assert_eq!(got, want);
        match (outcome.n_reached(), record.goals.len()) {
            (_, 0) => {}
            (r, n) if r == n => full += 1,
            _ => partial += 1,
        }
    }
    assert_eq!(freq.total(), seen.values().sum::<u64>());
    (idle, partial, full)
}

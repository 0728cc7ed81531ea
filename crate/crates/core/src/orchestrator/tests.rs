use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::embed::{onehot, OneHotEmbedder};
use crate::envgrid::{Action, Cell, Color, Direction, Event, GridConfig, GridState, ObjKind};
use crate::instructor::{Partition, SynonymDb};
use crate::qlearn::{BcSample, ReplayBuffer, TrainerConfig};

fn room() -> GridConfig {
    GridConfig {
        rooms_per_side: 1,
        room_interior: 5,
        n_balls: 0,
        n_boxes: 0,
        n_keys: 0,
        max_steps: 30,
        ..GridConfig::default()
    }
}

fn red_ball() -> Cell {
    Cell::Object {
        kind: ObjKind::Ball,
        color: Color::Red,
    }
}

/// Agent at (1,1) facing east with a red ball two cells ahead.
fn ball_scene() -> GridState {
    let mut s = GridState::empty(room(), (1, 1), Direction::E).unwrap();
    s.set_cell((1, 3), red_ball()).unwrap();
    s
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(11)
}

fn db() -> SynonymDb {
    SynonymDb::generate(8, 3).unwrap()
}

fn setup<'a>(db: &'a SynonymDb, emb: &'a OneHotEmbedder) -> StudentSetup<'a> {
    StudentSetup {
        db,
        embedder: emb,
        partition: Partition::Train,
        frame_stack: 2,
        reward: 3.0,
    }
}

fn facing_red_ball() -> Event {
    Event::facing(Color::Red, ObjKind::Ball)
}

#[test]
fn idle_teacher_triggers_nothing() {
    let mut t = Scripted::new(vec![]);
    let rec = run_teacher_from(&mut t, 0, 0, ball_scene(), 2, &mut rng()).unwrap();
    assert!(rec.goals.is_empty());
    assert_eq!(rec.len(), 30);
}

#[test]
fn scripted_teacher_walks_to_ball_and_picks_it_up() {
    let mut t = Scripted::new(vec![Action::MoveForward, Action::Pickup]);
    let rec = run_teacher_from(&mut t, 0, 0, ball_scene(), 2, &mut rng()).unwrap();
    assert_eq!(
        rec.goal_events(),
        vec![facing_red_ball(), Event::holding(Color::Red, ObjKind::Ball)]
    );
    assert_eq!(rec.goals[0].step, 0);
    assert_eq!(rec.goals[1].step, 1);
}

#[test]
fn teacher_rollout_is_deterministic() {
    let grid = GridConfig::default();
    let a = run_teacher_rollout(&mut RandomPolicy, 0, &grid, 5, 4, &mut rng()).unwrap();
    let b = run_teacher_rollout(&mut RandomPolicy, 0, &grid, 5, 4, &mut rng()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), grid.max_steps as usize);
}

#[test]
fn teacher_frames_chain_through_the_trace() {
    let grid = GridConfig::default();
    let rec = run_teacher_rollout(&mut RandomPolicy, 0, &grid, 9, 3, &mut rng()).unwrap();
    for t in 0..rec.len() - 1 {
        let next = &rec.trace[t + 1];
        assert_eq!(rec.trace[t].state.step(rec.trace[t].action).0, next.state);
        assert_eq!(rec.next_frames(t), &*next.frames);
    }
}

#[test]
fn vacuous_student_rollout() {
    let (db, emb) = (db(), OneHotEmbedder);
    let (out, tr) =
        run_student_rollout(&mut RandomPolicy, &ball_scene(), &[], &setup(&db, &emb), &mut rng(), &mut rng()).unwrap();
    assert!(out.success());
    assert_eq!(out.steps_used, 0);
    assert!(tr.is_empty());
}

#[test]
fn reaching_goal_at_step_ten_is_rewarded_and_terminal() {
    let (db, emb) = (db(), OneHotEmbedder);
    let mut script = vec![Action::Drop; 10];
    script.push(Action::MoveForward);
    let (out, tr) = run_student_rollout(
        &mut Scripted::new(script),
        &ball_scene(),
        &[facing_red_ball()],
        &setup(&db, &emb),
        &mut rng(),
        &mut rng(),
    )
    .unwrap();
    assert_eq!(tr.len(), 11);
    assert_eq!(out.reach_steps, vec![Some(10)]);
    assert_eq!(tr[10].reward, 3.0);
    assert!(tr[10].done);
    assert!(tr[..10].iter().all(|t| t.reward == 0.0 && !t.done));
    assert_eq!(&*tr[0].goal, onehot(facing_red_ball()).unwrap().as_slice());
}

#[test]
fn blocked_queue_never_presents_later_goals() {
    let (db, emb) = (db(), OneHotEmbedder);
    let goals = [Event::facing(Color::Blue, ObjKind::Key), facing_red_ball()];
    let (out, tr) = run_student_rollout(
        &mut Scripted::new(vec![Action::MoveForward]),
        &ball_scene(),
        &goals,
        &setup(&db, &emb),
        &mut rng(),
        &mut rng(),
    )
    .unwrap();
    assert_eq!(out.reached, vec![false, false]);
    assert!(out.instructions[1].is_none());
    assert!(out.conditioned_on.iter().all(|&g| g == 0));
    assert!(tr.iter().all(|t| t.reward == 0.0));
    assert_eq!(tr.len(), 30);
    assert!(tr.last().unwrap().done);
    assert!(tr[..29].iter().all(|t| !t.done));
}

#[test]
fn student_starts_from_teacher_initial_state() {
    let grid = GridConfig::default();
    let rec = run_teacher_rollout(&mut RandomPolicy, 0, &grid, 21, 2, &mut rng()).unwrap();
    let (db, emb) = (db(), OneHotEmbedder);
    let (out, _) = run_student_for(&mut RandomPolicy, &rec, &setup(&db, &emb), &mut rng(), &mut rng()).unwrap();
    assert_eq!(out.initial_state, rec.initial_state);
}

fn fake_record(goals: &[(Event, usize)], len: usize) -> RolloutRecord {
    let state = ball_scene();
    let trace = (0..len)
        .map(|t| TeacherStep {
            state: state.clone(),
            frames: vec![t as u8; 4].into_boxed_slice(),
            action: Action::ALL[t % Action::COUNT],
            events: vec![],
        })
        .collect();
    RolloutRecord {
        teacher_id: 0,
        env_seed: 0,
        initial_state: state,
        trace,
        final_frames: vec![0; 4].into_boxed_slice(),
        goals: goals.iter().map(|&(event, step)| GoalOccurrence { event, step }).collect(),
    }
}

#[test]
fn rewards_for_reached_and_failed_goals() {
    let e1 = facing_red_ball();
    let e2 = Event::facing(Color::Blue, ObjKind::Box);
    let rec = fake_record(&[(e1, 3), (e2, 7)], 10);
    let mut freq = EventFrequency::new();
    let r = distribute_rewards(&rec, &[true, false], &mut freq, &TrainerConfig::default());
    assert_eq!(r[3], -2.0 + 3.0);
    assert_eq!(r[7], 6.0 + 3.0);
    assert_eq!(r.iter().filter(|&&x| x != 0.0).count(), 2);
    assert_eq!(freq.get(e1), 1);
    let r = distribute_rewards(&rec, &[true, true], &mut freq, &TrainerConfig::default());
    assert!((r[3] - (-2.0 + 2.91)).abs() < 1e-12);
}

#[test]
fn eventless_rollout_costs_the_teacher() {
    let rec = fake_record(&[], 10);
    let r = distribute_rewards(&rec, &[], &mut EventFrequency::new(), &TrainerConfig::default());
    assert_eq!(r[9], -8.0);
    assert_eq!(r.iter().sum::<f64>(), -8.0);
}

#[test]
fn bonus_sequence() {
    assert_eq!(exploration_bonus(0, 3.0, 0.97), 3.0);
    assert!((exploration_bonus(1, 3.0, 0.97) - 2.91).abs() < 1e-12);
}

#[test]
fn bc_buffer_takes_only_failed_segments() {
    let (db, emb) = (db(), OneHotEmbedder);
    let e1 = facing_red_ball();
    let e2 = Event::facing(Color::Green, ObjKind::Key);
    let rec = fake_record(&[(e1, 4), (e2, 9)], 12);
    let mut bc = ReplayBuffer::<BcSample>::new(100);
    let n = fill_bc_buffer(&rec, &[true, true], &mut bc, &db, &emb, Partition::Train, &mut rng()).unwrap();
    assert_eq!((n, bc.len()), (0, 0));
    let n = fill_bc_buffer(&rec, &[true, false], &mut bc, &db, &emb, Partition::Train, &mut rng()).unwrap();
    assert_eq!(n, 5);
    let want = onehot(e2).unwrap();
    for (s, t) in bc.iter().zip(5..=9) {
        assert_eq!(&*s.obs, &*rec.trace[t].frames);
        assert_eq!(s.action as usize, rec.trace[t].action.index());
        assert_eq!(&*s.goal, want.as_slice());
    }
    let empty = fake_record(&[], 12);
    let mut bc = ReplayBuffer::<BcSample>::new(100);
    fill_bc_buffer(&empty, &[], &mut bc, &db, &emb, Partition::Train, &mut rng()).unwrap();
    assert!(bc.is_empty());
}

#[test]
fn teacher_rotation_uses_rollout_mod_n() {
    let seq: Vec<usize> = (1..=8).map(|r| Trainer::teacher_for(r, 4)).collect();
    assert_eq!(seq, vec![1, 2, 3, 0, 1, 2, 3, 0]);
}

#[test]
fn registry_knows_builtin_policies() {
    let reg = PolicyRegistry::builtin();
    assert_eq!(reg.names().collect::<Vec<_>>(), vec!["d3qn", "random"]);
    let cfg = TrainerConfig {
        hidden: vec![4],
        frame_stack: 1,
        ..Default::default()
    };
    assert!(reg.build("d3qn", &cfg, 0, &mut rng()).unwrap().learner_ref().is_some());
    assert!(reg.build("random", &cfg, 0, &mut rng()).unwrap().learner_ref().is_none());
    assert!(reg.build("oracle", &cfg, 0, &mut rng()).is_err());
}

#[test]
fn metrics_row_format() {
    let m = RolloutMetrics {
        rollout: 3,
        teacher_id: 1,
        n_events: 2,
        n_reached: 1,
        teacher_reward_sum: 7.5,
        student_reward_sum: 3.0,
        l_rl: Some(0.25),
        l_bc: None,
        bc_weight: 0.1,
        epsilon_student: 1.0,
        wall_ms: 0,
        env_steps: 230,
        eval_success: None,
    };
    assert_eq!(m.csv_row(), "3,1,2,1,7.5,3,0.25,,0.1,1,0,230,");
    assert_eq!(METRICS_HEADER.split(',').count(), m.csv_row().split(',').count());
}

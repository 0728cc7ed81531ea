use super::*;

fn one_room() -> GridConfig {
    GridConfig {
        rooms_per_side: 1,
        room_interior: 5,
        n_balls: 0,
        n_boxes: 0,
        n_keys: 0,
        ..GridConfig::default()
    }
}

fn two_rooms() -> GridConfig {
    GridConfig {
        rooms_per_side: 2,
        room_interior: 4,
        n_balls: 0,
        n_boxes: 0,
        n_keys: 0,
        ..GridConfig::default()
    }
}

fn ball(color: Color) -> Cell {
    Cell::Object {
        kind: ObjKind::Ball,
        color,
    }
}

#[test]
fn same_seed_same_state() {
    let a = new_env(GridConfig::default(), 7).unwrap();
    let b = new_env(GridConfig::default(), 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn different_seed_moves_objects() {
    let a = new_env(GridConfig::default(), 7).unwrap();
    let b = new_env(GridConfig::default(), 8).unwrap();
    let pos = |s: &GridState| s.objects().iter().map(|o| o.position).collect::<Vec<_>>();
    assert_ne!(pos(&a), pos(&b));
}

#[test]
fn overfull_config_is_rejected() {
    let cfg = GridConfig {
        n_balls: 1_000_000,
        ..GridConfig::default()
    };
    assert!(matches!(new_env(cfg, 3), Err(GlideError::Config(_))));
}

#[test]
fn default_layout_counts() {
    let cfg = GridConfig::default();
    let s = new_env(cfg, 11).unwrap();
    assert_eq!(s.side(), 22);
    let doors = s.doors();
    assert_eq!(doors.len(), 12);
    assert_eq!(
        doors
            .iter()
            .filter(|d| d.door_state == Some(DoorState::Locked))
            .count(),
        3
    );
    assert_eq!(s.objects().len(), 12 + 9);
    assert!(s.cell(s.agent_pos()).is_passable());
}

#[test]
fn invalid_configs() {
    let mut cfg = GridConfig::default();
    cfg.room_interior = 2;
    assert!(cfg.validate().is_err());
    let mut cfg = GridConfig::default();
    cfg.colors[1] = Color::Red;
    assert!(cfg.validate().is_err());
    let mut cfg = GridConfig::default();
    cfg.locked_door_fraction = 1.5;
    assert!(cfg.validate().is_err());
}

#[test]
fn pickup_facing_ball_emits_holding() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    s.set_cell((2, 3), ball(Color::Red)).unwrap();
    let (next, events) = s.step(Action::Pickup);
    assert_eq!(next.carried(), Some((Color::Red, ObjKind::Ball)));
    assert_eq!(next.cell((2, 3)), Cell::Empty);
    assert_eq!(events, vec![Event::holding(Color::Red, ObjKind::Ball)]);
}

#[test]
fn move_into_wall_is_blocked() {
    let s = GridState::empty(one_room(), (1, 1), Direction::N).unwrap();
    let (next, events) = s.step(Action::MoveForward);
    assert_eq!(next.agent_pos(), (1, 1));
    assert_eq!(next.step_count(), 1);
    assert!(events.is_empty());
}

#[test]
fn matching_key_unlocks_door() {
    // Vertical wall at column 5 separates the two top rooms.
    let mut s = GridState::empty(two_rooms(), (2, 4), Direction::E).unwrap();
    s.set_cell(
        (2, 5),
        Cell::Door {
            color: Color::Green,
            state: DoorState::Locked,
        },
    )
    .unwrap();
    s.set_carried(Some((Color::Green, ObjKind::Key))).unwrap();
    let (next, events) = s.step(Action::Toggle);
    assert_eq!(
        next.cell((2, 5)),
        Cell::Door {
            color: Color::Green,
            state: DoorState::Open
        }
    );
    assert_eq!(events, vec![Event::opened(Color::Green)]);
}

#[test]
fn wrong_key_leaves_door_locked() {
    let mut s = GridState::empty(two_rooms(), (2, 4), Direction::E).unwrap();
    let locked = Cell::Door {
        color: Color::Green,
        state: DoorState::Locked,
    };
    s.set_cell((2, 5), locked).unwrap();
    s.set_carried(Some((Color::Blue, ObjKind::Key))).unwrap();
    let (next, events) = s.step(Action::Toggle);
    assert_eq!(next.cell((2, 5)), locked);
    assert!(events.is_empty());
}

#[test]
fn toggling_open_door_closes_it_and_door_blocks_movement() {
    let mut s = GridState::empty(two_rooms(), (2, 4), Direction::E).unwrap();
    s.set_cell(
        (2, 5),
        Cell::Door {
            color: Color::Blue,
            state: DoorState::Closed,
        },
    )
    .unwrap();
    let (blocked, _) = s.step(Action::MoveForward);
    assert_eq!(blocked.agent_pos(), (2, 4));
    let (open, ev) = s.step(Action::Toggle);
    assert_eq!(ev, vec![Event::opened(Color::Blue)]);
    let (through, _) = open.step(Action::MoveForward);
    assert_eq!(through.agent_pos(), (2, 5));
    let (closed, ev) = open.step(Action::Toggle);
    assert!(ev.is_empty());
    assert_eq!(
        closed.cell((2, 5)),
        Cell::Door {
            color: Color::Blue,
            state: DoorState::Closed
        }
    );
}

#[test]
fn drop_requires_empty_front() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    s.set_cell((2, 3), ball(Color::Red)).unwrap();
    s.set_carried(Some((Color::Blue, ObjKind::Box))).unwrap();
    let (same, ev) = s.step(Action::Drop);
    assert_eq!(same.carried(), Some((Color::Blue, ObjKind::Box)));
    assert!(ev.is_empty());
    let (turned, _) = s.step(Action::TurnRight);
    let (dropped, ev) = turned.step(Action::Drop);
    assert_eq!(dropped.carried(), None);
    assert_eq!(ev, vec![Event::facing(Color::Blue, ObjKind::Box)]);
}

#[test]
fn pickup_with_full_hands_is_noop() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    s.set_cell((2, 3), ball(Color::Red)).unwrap();
    s.set_carried(Some((Color::Blue, ObjKind::Key))).unwrap();
    let (next, ev) = s.step(Action::Pickup);
    assert_eq!(next.cell((2, 3)), ball(Color::Red));
    assert!(ev.is_empty());
}

#[test]
fn done_is_noop_except_counter() {
    let s = new_env(GridConfig::default(), 5).unwrap();
    let (next, ev) = s.step(Action::Done);
    assert!(ev.is_empty());
    assert_eq!(next.step_count(), 1);
    assert_eq!(next.cells(), s.cells());
    assert_eq!(next.agent_pos(), s.agent_pos());
}

#[test]
fn terminal_state_is_frozen() {
    let mut cfg = one_room();
    cfg.max_steps = 2;
    let mut s = GridState::empty(cfg, (3, 3), Direction::N).unwrap();
    s.step_mut(Action::TurnLeft);
    s.step_mut(Action::TurnLeft);
    assert!(s.is_terminal());
    let before = s.clone();
    assert!(s.step_mut(Action::TurnLeft).is_empty());
    assert_eq!(s, before);
}

#[test]
fn facing_edge_fires_once() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::E).unwrap();
    s.set_cell((2, 3), Cell::Object { kind: ObjKind::Box, color: Color::Blue }).unwrap();
    let (facing, ev) = s.step(Action::TurnLeft);
    assert_eq!(ev, vec![Event::facing(Color::Blue, ObjKind::Box)]);
    let (still, ev) = facing.step(Action::Done);
    assert!(ev.is_empty());
    assert!(detect_events(&still, &still).is_empty());
}

#[test]
fn same_looking_objects_do_not_retrigger() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    s.set_cell((2, 3), ball(Color::Red)).unwrap();
    s.set_cell((3, 4), ball(Color::Red)).unwrap();
    let (next, ev) = s.step(Action::TurnRight);
    assert!(ev.is_empty());
    assert_eq!(next.front_cell(), ball(Color::Red));
}

#[test]
fn event_mask_filters_kinds() {
    let mut cfg = one_room();
    cfg.events = EventMask::parse_list("FACING").unwrap();
    let mut s = GridState::empty(cfg, (3, 3), Direction::N).unwrap();
    s.set_cell((2, 3), ball(Color::Red)).unwrap();
    let (_, ev) = s.step(Action::Pickup);
    assert!(ev.is_empty());
}

#[test]
fn facing_ball_appears_in_front_view_cell() {
    for dir in Direction::ALL {
        let mut s = GridState::empty(one_room(), (3, 3), dir).unwrap();
        let (dr, dc) = dir.offset();
        let front = ((3 + dr) as usize, (3 + dc) as usize);
        s.set_cell(front, ball(Color::Red)).unwrap();
        let obs = s.observe();
        assert_eq!(obs.shape(), (7, 7, 3));
        assert_eq!(obs.get(5, 3), [codes::BALL, Color::Red.id(), 0]);
        assert_eq!(obs, s.observe());
    }
}

#[test]
fn agent_cell_shows_carried_item() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    assert_eq!(s.observe().get(6, 3), [codes::EMPTY, 0, 0]);
    s.set_carried(Some((Color::Yellow, ObjKind::Key))).unwrap();
    assert_eq!(s.observe().get(6, 3), [codes::KEY, Color::Yellow.id(), 0]);
}

#[test]
fn closed_door_hides_next_room() {
    // Agent in the top-left room looking east at a closed door; a ball sits
    // right behind it.
    let mut s = GridState::empty(two_rooms(), (2, 3), Direction::E).unwrap();
    let door = Cell::Door {
        color: Color::Red,
        state: DoorState::Closed,
    };
    s.set_cell((2, 5), door).unwrap();
    s.set_cell((2, 6), ball(Color::Purple)).unwrap();
    let view = s.observe();
    // Door is two cells ahead, the ball three.
    assert_eq!(view.get(4, 3), door.encode());
    assert_eq!(view.get(3, 3), [codes::UNSEEN, 0, 0]);

    let (open, _) = s.step(Action::MoveForward);
    let (open, _) = open.step(Action::Toggle);
    let view = open.observe();
    assert_eq!(view.get(4, 3), [codes::BALL, Color::Purple.id(), 0]);
}

#[test]
fn json_round_trip_is_exact() {
    let s = new_env(GridConfig::default(), 99).unwrap();
    let (s, _) = s.step(Action::MoveForward);
    let text = s.to_json();
    let back = GridState::from_json(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.to_json(), text);
}

#[test]
fn json_rejects_corruption() {
    let s = new_env(GridConfig::default(), 99).unwrap();
    let text = s.to_json().replacen("\"side\":22", "\"side\":21", 1);
    assert!(GridState::from_json(&text).is_err());
    assert!(GridState::from_json("{}").is_err());
}

#[test]
fn scenario_builders_validate() {
    let mut s = GridState::empty(one_room(), (3, 3), Direction::N).unwrap();
    assert!(s.set_cell((0, 3), ball(Color::Red)).is_err());
    assert!(s.set_cell((3, 3), ball(Color::Red)).is_err());
    assert!(s
        .set_cell((2, 2), Cell::Door { color: Color::Red, state: DoorState::Open })
        .is_err());
    assert!(s.set_carried(Some((Color::Red, ObjKind::Door))).is_err());
    assert!(s.place_agent((0, 0), Direction::N).is_err());
}

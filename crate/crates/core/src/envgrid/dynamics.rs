use super::{Action, Cell, Color, DoorState, Event, GridState, ObjKind};

/// Predicate values at one state that event detection compares across a step.
#[derive(Clone, Copy)]
struct Edges {
    front_pos: (isize, isize),
    front: Cell,
    carried: Option<(Color, ObjKind)>,
}

impl Edges {
    fn of(state: &GridState) -> Edges {
        Edges {
            front_pos: state.front_pos(),
            front: state.front_cell(),
            carried: state.carried(),
        }
    }
}

fn edges_to_events(prev: Edges, next: &GridState) -> Vec<Event> {
    let now = Edges::of(next);
    let mut events = Vec::new();

    // Only the faced door can change, and only through the agent's toggle,
    // which leaves the pose unchanged.
    if prev.front_pos == now.front_pos {
        if let (
            Cell::Door {
                color: before,
                state: DoorState::Closed | DoorState::Locked,
            },
            Cell::Door {
                color,
                state: DoorState::Open,
            },
        ) = (prev.front, now.front)
        {
            if before == color {
                events.push(Event::opened(color));
            }
        }
    }
    if let Some((color, kind)) = now.carried {
        if prev.carried != now.carried {
            events.push(Event::holding(color, kind));
        }
    }
    if let Some((color, kind)) = now.front.object() {
        if prev.front.object() != Some((color, kind)) {
            events.push(Event::facing(color, kind));
        }
    }
    let mask = next.config().events;
    events.retain(|e| mask.allows(e.kind()));
    events
}

/// Rising-edge events between two consecutive states, ordered OPENED,
/// HOLDING, FACING.
pub fn detect_events(prev: &GridState, next: &GridState) -> Vec<Event> {
    edges_to_events(Edges::of(prev), next)
}

impl GridState {
    /// Pure step: returns the successor state and the events it triggered.
    pub fn step(&self, action: Action) -> (GridState, Vec<Event>) {
        let mut next = self.clone();
        let events = next.step_mut(action);
        (next, events)
    }

    /// In-place step. Illegal actions leave the state unchanged apart from the
    /// step counter. Once `max_steps` is reached the state is frozen.
    pub fn step_mut(&mut self, action: Action) -> Vec<Event> {
        if self.is_terminal() {
            return Vec::new();
        }
        let prev = Edges::of(self);
        self.apply(action);
        self.step += 1;
        edges_to_events(prev, self)
    }

    fn apply(&mut self, action: Action) {
        let (fr, fc) = self.front_pos();
        let front = self.cell_at(fr, fc);
        let front_idx = || fr as usize * self.side + fc as usize;
        match action {
            Action::TurnLeft => self.agent_dir = self.agent_dir.left(),
            Action::TurnRight => self.agent_dir = self.agent_dir.right(),
            Action::MoveForward => {
                if front.is_passable() {
                    self.agent_pos = (fr as usize, fc as usize);
                }
            }
            Action::Pickup => {
                if let (None, Cell::Object { kind, color }) = (self.carried, front) {
                    self.carried = Some((color, kind));
                    let i = front_idx();
                    self.cells[i] = Cell::Empty;
                }
            }
            Action::Drop => {
                if let (Some((color, kind)), Cell::Empty) = (self.carried, front) {
                    let i = front_idx();
                    self.cells[i] = Cell::Object { kind, color };
                    self.carried = None;
                }
            }
            Action::Toggle => {
                if let Cell::Door { color, state } = front {
                    let state = match state {
                        DoorState::Open => DoorState::Closed,
                        DoorState::Closed => DoorState::Open,
                        DoorState::Locked => match self.carried {
                            Some((key_color, ObjKind::Key)) if key_color == color => DoorState::Open,
                            _ => DoorState::Locked,
                        },
                    };
                    let i = front_idx();
                    self.cells[i] = Cell::Door { color, state };
                }
            }
            Action::Done => {}
        }
    }
}

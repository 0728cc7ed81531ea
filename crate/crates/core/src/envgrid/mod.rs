//! Deterministic multi-room gridworld with egocentric partial observation and
//! rising-edge event detection.

mod dynamics;
mod event;
mod layout;
mod types;
mod view;

use serde::{Deserialize, Serialize};

use crate::error::{GlideError, Result};

pub use dynamics::detect_events;
pub use event::{Event, EventKind, EventMask};
pub use types::{codes, Action, Cell, Color, Direction, DoorState, ObjKind, ObjectSpec};
pub use view::{Observation, VIEW_CELLS, VIEW_CHANNELS, VIEW_SIZE};

/// World generation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub rooms_per_side: usize,
    pub room_interior: usize,
    pub n_balls: usize,
    pub n_boxes: usize,
    pub n_keys: usize,
    pub locked_door_fraction: f64,
    pub colors: [Color; 6],
    pub max_steps: u32,
    /// Event kinds reported by the simulator. Reduced worlds restrict this.
    pub events: EventMask,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            rooms_per_side: 3,
            room_interior: 6,
            n_balls: 3,
            n_boxes: 3,
            n_keys: 3,
            locked_door_fraction: 0.25,
            colors: Color::ALL,
            max_steps: 115,
            events: EventMask::ALL,
        }
    }
}

impl GridConfig {
    /// Side length of the square grid including outer walls.
    pub fn side(&self) -> usize {
        self.rooms_per_side * (self.room_interior + 1) + 1
    }

    pub fn n_objects(&self) -> usize {
        self.n_balls + self.n_boxes + self.n_keys
    }

    pub fn n_doors(&self) -> usize {
        2 * self.rooms_per_side * (self.rooms_per_side - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rooms_per_side < 1 {
            return Err(GlideError::Config("rooms_per_side must be >= 1".into()));
        }
        if self.room_interior < 3 {
            return Err(GlideError::Config("room_interior must be >= 3".into()));
        }
        if !(0.0..=1.0).contains(&self.locked_door_fraction) {
            return Err(GlideError::Config(
                "locked_door_fraction must lie in [0, 1]".into(),
            ));
        }
        for (i, c) in self.colors.iter().enumerate() {
            if self.colors[..i].contains(c) {
                return Err(GlideError::Config(format!("duplicate color {c}")));
            }
        }
        if self.max_steps == 0 {
            return Err(GlideError::Config("max_steps must be positive".into()));
        }
        let floor = self.rooms_per_side * self.rooms_per_side * self.room_interior * self.room_interior;
        if self.n_objects() + 1 > floor {
            return Err(GlideError::Config(format!(
                "{} objects plus the agent do not fit in {floor} floor cells",
                self.n_objects()
            )));
        }
        Ok(())
    }
}

/// Full simulator state. Cheap to clone; stepping never mutates shared data.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    config: GridConfig,
    side: usize,
    cells: Vec<Cell>,
    agent_pos: (usize, usize),
    agent_dir: Direction,
    carried: Option<(Color, ObjKind)>,
    step: u32,
    rng_seed: u64,
}

impl GridState {
    /// Random initial state drawn from `config` using only `seed`.
    pub fn new(config: GridConfig, seed: u64) -> Result<GridState> {
        layout::generate(config, seed)
    }

    /// Walled empty world with the agent at `agent_pos`; used to build scenarios.
    pub fn empty(config: GridConfig, agent_pos: (usize, usize), agent_dir: Direction) -> Result<GridState> {
        config.validate()?;
        let mut state = GridState {
            config,
            side: config.side(),
            cells: layout::walls(&config),
            agent_pos: (0, 0),
            agent_dir,
            carried: None,
            step: 0,
            rng_seed: 0,
        };
        state.place_agent(agent_pos, agent_dir)?;
        Ok(state)
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn agent_pos(&self) -> (usize, usize) {
        self.agent_pos
    }

    pub fn agent_dir(&self) -> Direction {
        self.agent_dir
    }

    pub fn carried(&self) -> Option<(Color, ObjKind)> {
        self.carried
    }

    pub fn step_count(&self) -> u32 {
        self.step
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn is_terminal(&self) -> bool {
        self.step >= self.config.max_steps
    }

    pub fn cell(&self, pos: (usize, usize)) -> Cell {
        self.cells[pos.0 * self.side + pos.1]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell at a signed position; anything off the grid reads as wall.
    pub fn cell_at(&self, row: isize, col: isize) -> Cell {
        if row < 0 || col < 0 || row as usize >= self.side || col as usize >= self.side {
            Cell::Wall
        } else {
            self.cell((row as usize, col as usize))
        }
    }

    pub fn front_pos(&self) -> (isize, isize) {
        let (dr, dc) = self.agent_dir.offset();
        (self.agent_pos.0 as isize + dr, self.agent_pos.1 as isize + dc)
    }

    pub fn front_cell(&self) -> Cell {
        let (r, c) = self.front_pos();
        self.cell_at(r, c)
    }

    /// All doors and portable objects on the grid (carried item excluded).
    pub fn objects(&self) -> Vec<ObjectSpec> {
        let mut out = Vec::new();
        for (i, cell) in self.cells.iter().enumerate() {
            let position = (i / self.side, i % self.side);
            match *cell {
                Cell::Door { color, state } => out.push(ObjectSpec {
                    kind: ObjKind::Door,
                    color,
                    position,
                    door_state: Some(state),
                }),
                Cell::Object { kind, color } => out.push(ObjectSpec {
                    kind,
                    color,
                    position,
                    door_state: None,
                }),
                _ => {}
            }
        }
        out
    }

    pub fn doors(&self) -> Vec<ObjectSpec> {
        self.objects()
            .into_iter()
            .filter(|o| o.kind == ObjKind::Door)
            .collect()
    }

    /// Overwrites one cell. Doors may only go into wall lines, other objects
    /// only onto floor that the agent does not occupy.
    pub fn set_cell(&mut self, pos: (usize, usize), cell: Cell) -> Result<()> {
        if pos.0 >= self.side || pos.1 >= self.side {
            return Err(GlideError::Input(format!("cell {pos:?} outside grid")));
        }
        let on_wall_line = layout::is_wall_line(&self.config, pos);
        match cell {
            Cell::Door { .. } if !on_wall_line => {
                return Err(GlideError::Input(format!("door at {pos:?} is not on a wall")))
            }
            Cell::Object { kind: ObjKind::Door, .. } => {
                return Err(GlideError::Input("doors must use Cell::Door".into()))
            }
            Cell::Object { .. } | Cell::Empty if on_wall_line => {
                return Err(GlideError::Input(format!("{pos:?} is a wall cell")))
            }
            Cell::Object { .. } if pos == self.agent_pos => {
                return Err(GlideError::Input("object placed under the agent".into()))
            }
            _ => {}
        }
        self.cells[pos.0 * self.side + pos.1] = cell;
        Ok(())
    }

    pub fn place_agent(&mut self, pos: (usize, usize), dir: Direction) -> Result<()> {
        if pos.0 >= self.side || pos.1 >= self.side || !self.cell(pos).is_passable() {
            return Err(GlideError::Input(format!("agent cell {pos:?} is not passable")));
        }
        self.agent_pos = pos;
        self.agent_dir = dir;
        Ok(())
    }

    pub fn set_carried(&mut self, carried: Option<(Color, ObjKind)>) -> Result<()> {
        if let Some((_, ObjKind::Door)) = carried {
            return Err(GlideError::Input("cannot carry a door".into()));
        }
        self.carried = carried;
        Ok(())
    }

    /// Canonical JSON encoding. Cells are `[kind, color, state]` integer triples.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("grid state serializes")
    }

    pub fn from_json(text: &str) -> Result<GridState> {
        let wire: StateWire =
            serde_json::from_str(text).map_err(|e| GlideError::Format(format!("grid state: {e}")))?;
        GridState::from_wire(wire)
    }

    fn to_wire(&self) -> StateWire {
        StateWire {
            config: self.config,
            side: self.side,
            cells: self.cells.iter().map(|c| c.encode()).collect(),
            agent_pos: [self.agent_pos.0, self.agent_pos.1],
            agent_dir: self.agent_dir.id(),
            carried: self
                .carried
                .map(|(color, kind)| [codes::kind(kind), color.id()]),
            step: self.step,
            rng_seed: self.rng_seed,
        }
    }

    fn from_wire(w: StateWire) -> Result<GridState> {
        w.config.validate()?;
        let bad = |m: &str| GlideError::Format(format!("grid state: {m}"));
        if w.side != w.config.side() || w.cells.len() != w.side * w.side {
            return Err(bad("grid dimensions do not match config"));
        }
        let cells = w
            .cells
            .iter()
            .map(|&c| Cell::decode(c).ok_or_else(|| bad("invalid cell code")))
            .collect::<Result<Vec<_>>>()?;
        let carried = match w.carried {
            None => None,
            Some([k, c]) => {
                let kind = codes::kind_from(k)
                    .filter(|k| k.is_portable())
                    .ok_or_else(|| bad("invalid carried kind"))?;
                Some((Color::from_id(c).ok_or_else(|| bad("invalid carried color"))?, kind))
            }
        };
        let agent_pos = (w.agent_pos[0], w.agent_pos[1]);
        if agent_pos.0 >= w.side || agent_pos.1 >= w.side {
            return Err(bad("agent outside grid"));
        }
        let state = GridState {
            config: w.config,
            side: w.side,
            agent_pos,
            agent_dir: Direction::from_id(w.agent_dir).ok_or_else(|| bad("invalid direction"))?,
            cells,
            carried,
            step: w.step,
            rng_seed: w.rng_seed,
        };
        if !state.cell(agent_pos).is_passable() {
            return Err(bad("agent not on a passable cell"));
        }
        if state.step > state.config.max_steps {
            return Err(bad("step counter beyond max_steps"));
        }
        Ok(state)
    }
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    config: GridConfig,
    side: usize,
    cells: Vec<[u8; 3]>,
    agent_pos: [usize; 2],
    agent_dir: u8,
    carried: Option<[u8; 2]>,
    step: u32,
    rng_seed: u64,
}

/// Random initial state; see [`GridState::new`].
pub fn new_env(config: GridConfig, seed: u64) -> Result<GridState> {
    GridState::new(config, seed)
}

#[cfg(test)]
mod tests;

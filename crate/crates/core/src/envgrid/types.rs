use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GlideError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
    Grey,
    Purple,
    Yellow,
}

impl Color {
    pub const ALL: [Color; 6] = [
        Color::Red,
        Color::Green,
        Color::Blue,
        Color::Grey,
        Color::Purple,
        Color::Yellow,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Color> {
        Color::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Grey => "grey",
            Color::Purple => "purple",
            Color::Yellow => "yellow",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = GlideError;

    fn from_str(s: &str) -> Result<Self> {
        Color::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| GlideError::Input(format!("unknown color {s:?}")))
    }
}

/// Object categories. Doors live in wall cells; the others on floor cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjKind {
    Ball,
    Box,
    Key,
    Door,
}

impl ObjKind {
    pub const ALL: [ObjKind; 4] = [ObjKind::Ball, ObjKind::Box, ObjKind::Key, ObjKind::Door];
    pub const PORTABLE: [ObjKind; 3] = [ObjKind::Ball, ObjKind::Box, ObjKind::Key];

    pub fn name(self) -> &'static str {
        match self {
            ObjKind::Ball => "ball",
            ObjKind::Box => "box",
            ObjKind::Key => "key",
            ObjKind::Door => "door",
        }
    }

    pub fn is_portable(self) -> bool {
        self != ObjKind::Door
    }
}

impl fmt::Display for ObjKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjKind {
    type Err = GlideError;

    fn from_str(s: &str) -> Result<Self> {
        ObjKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GlideError::Input(format!("unknown object kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoorState {
    Open,
    Closed,
    Locked,
}

/// Contents of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Empty,
    Wall,
    Door { color: Color, state: DoorState },
    /// A portable object (ball, box or key).
    Object { kind: ObjKind, color: Color },
}

impl Cell {
    /// Integer triple used both in observations and in the canonical state
    /// encoding: (kind id, color id, state id).
    pub fn encode(self) -> [u8; 3] {
        match self {
            Cell::Empty => [codes::EMPTY, 0, 0],
            Cell::Wall => [codes::WALL, 0, 0],
            Cell::Door { color, state } => [codes::DOOR, color.id(), codes::door_state(state)],
            Cell::Object { kind, color } => [codes::kind(kind), color.id(), 0],
        }
    }

    pub fn decode(code: [u8; 3]) -> Option<Cell> {
        let [kind, color, state] = code;
        match kind {
            codes::EMPTY => Some(Cell::Empty),
            codes::WALL => Some(Cell::Wall),
            codes::DOOR => {
                let state = match state {
                    codes::OPEN => DoorState::Open,
                    codes::CLOSED => DoorState::Closed,
                    codes::LOCKED => DoorState::Locked,
                    _ => return None,
                };
                Some(Cell::Door {
                    color: Color::from_id(color)?,
                    state,
                })
            }
            codes::KEY | codes::BALL | codes::BOX => Some(Cell::Object {
                kind: codes::kind_from(kind)?,
                color: Color::from_id(color)?,
            }),
            _ => None,
        }
    }

    /// The agent may stand here: empty floor or an open door.
    pub fn is_passable(self) -> bool {
        matches!(
            self,
            Cell::Empty
                | Cell::Door {
                    state: DoorState::Open,
                    ..
                }
        )
    }

    /// Blocks line of sight (walls and shut doors).
    pub fn is_opaque(self) -> bool {
        matches!(
            self,
            Cell::Wall
                | Cell::Door {
                    state: DoorState::Closed | DoorState::Locked,
                    ..
                }
        )
    }

    /// The (color, kind) pair visible in this cell, if it holds an object or door.
    pub fn object(self) -> Option<(Color, ObjKind)> {
        match self {
            Cell::Door { color, .. } => Some((color, ObjKind::Door)),
            Cell::Object { kind, color } => Some((color, kind)),
            _ => None,
        }
    }
}

/// Integer ids used in the observation channels.
pub mod codes {
    use super::{DoorState, ObjKind};

    pub const UNSEEN: u8 = 0;
    pub const EMPTY: u8 = 1;
    pub const WALL: u8 = 2;
    pub const DOOR: u8 = 4;
    pub const KEY: u8 = 5;
    pub const BALL: u8 = 6;
    pub const BOX: u8 = 7;
    pub const MAX_KIND: u8 = 10;

    pub const OPEN: u8 = 1;
    pub const CLOSED: u8 = 2;
    pub const LOCKED: u8 = 3;

    pub fn kind(k: ObjKind) -> u8 {
        match k {
            ObjKind::Ball => BALL,
            ObjKind::Box => BOX,
            ObjKind::Key => KEY,
            ObjKind::Door => DOOR,
        }
    }

    pub fn kind_from(id: u8) -> Option<ObjKind> {
        match id {
            BALL => Some(ObjKind::Ball),
            BOX => Some(ObjKind::Box),
            KEY => Some(ObjKind::Key),
            DOOR => Some(ObjKind::Door),
            _ => None,
        }
    }

    pub fn door_state(s: DoorState) -> u8 {
        match s {
            DoorState::Open => OPEN,
            DoorState::Closed => CLOSED,
            DoorState::Locked => LOCKED,
        }
    }
}

/// Placed object description, as reported by [`super::GridState::objects`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ObjectSpec {
    pub kind: ObjKind,
    pub color: Color,
    pub position: (usize, usize),
    pub door_state: Option<DoorState>,
}

/// Agent heading. `N` is row-decreasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    N,
    E,
    S,
    W,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::N, Direction::E, Direction::S, Direction::W];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Direction> {
        Direction::ALL.get(id as usize).copied()
    }

    pub fn right(self) -> Direction {
        Direction::ALL[(self as usize + 1) % 4]
    }

    pub fn left(self) -> Direction {
        Direction::ALL[(self as usize + 3) % 4]
    }

    /// Unit (row, col) offset of one step forward.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::N => (-1, 0),
            Direction::E => (0, 1),
            Direction::S => (1, 0),
            Direction::W => (0, -1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Action {
    TurnLeft = 0,
    TurnRight = 1,
    MoveForward = 2,
    Pickup = 3,
    Drop = 4,
    Toggle = 5,
    Done = 6,
}

impl Action {
    pub const COUNT: usize = 7;
    pub const ALL: [Action; 7] = [
        Action::TurnLeft,
        Action::TurnRight,
        Action::MoveForward,
        Action::Pickup,
        Action::Drop,
        Action::Toggle,
        Action::Done,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }
}

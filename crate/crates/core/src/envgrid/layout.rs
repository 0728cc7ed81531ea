use rand::seq::index::sample;
use rand::Rng;

use super::{Cell, Color, Direction, DoorState, GridConfig, GridState, ObjKind};
use crate::error::{GlideError, Result};
use crate::seed::{rng_for, Stream};

pub(super) fn is_wall_line(config: &GridConfig, pos: (usize, usize)) -> bool {
    let period = config.room_interior + 1;
    pos.0 % period == 0 || pos.1 % period == 0
}

pub(super) fn walls(config: &GridConfig) -> Vec<Cell> {
    let side = config.side();
    (0..side * side)
        .map(|i| {
            if is_wall_line(config, (i / side, i % side)) {
                Cell::Wall
            } else {
                Cell::Empty
            }
        })
        .collect()
}

/// Lays out walls, one door per pair of adjacent rooms, then objects and the
/// agent uniformly over the free floor.
pub(super) fn generate(config: GridConfig, seed: u64) -> Result<GridState> {
    config.validate()?;
    let mut rng = rng_for(seed, Stream::EnvLayout, 0);
    let side = config.side();
    let period = config.room_interior + 1;
    let rooms = config.rooms_per_side;
    let mut cells = walls(&config);

    let mut door_cells = Vec::with_capacity(config.n_doors());
    for i in 0..rooms {
        for j in 0..rooms {
            if j + 1 < rooms {
                let row = i * period + 1 + rng.gen_range(0..config.room_interior);
                door_cells.push(row * side + (j + 1) * period);
            }
            if i + 1 < rooms {
                let col = j * period + 1 + rng.gen_range(0..config.room_interior);
                door_cells.push((i + 1) * period * side + col);
            }
        }
    }
    let n_locked = (config.locked_door_fraction * door_cells.len() as f64).round() as usize;
    let mut locked = vec![false; door_cells.len()];
    for idx in sample(&mut rng, door_cells.len(), n_locked.min(door_cells.len())) {
        locked[idx] = true;
    }
    for (&cell, &is_locked) in door_cells.iter().zip(&locked) {
        let color = config.colors[rng.gen_range(0..config.colors.len())];
        let state = if is_locked {
            DoorState::Locked
        } else {
            DoorState::Closed
        };
        cells[cell] = Cell::Door { color, state };
    }

    let floor: Vec<usize> = (0..side * side)
        .filter(|&i| cells[i] == Cell::Empty)
        .collect();
    let n_objects = config.n_objects();
    if n_objects + 1 > floor.len() {
        return Err(GlideError::Config(format!(
            "cannot place {n_objects} objects and the agent on {} floor cells",
            floor.len()
        )));
    }
    let kinds = std::iter::repeat(ObjKind::Ball)
        .take(config.n_balls)
        .chain(std::iter::repeat(ObjKind::Box).take(config.n_boxes))
        .chain(std::iter::repeat(ObjKind::Key).take(config.n_keys));
    let spots = sample(&mut rng, floor.len(), n_objects + 1).into_vec();
    for (kind, &spot) in kinds.zip(&spots) {
        let color: Color = config.colors[rng.gen_range(0..config.colors.len())];
        cells[floor[spot]] = Cell::Object { kind, color };
    }
    let agent_cell = floor[spots[n_objects]];
    let agent_dir = Direction::ALL[rng.gen_range(0..4)];

    Ok(GridState {
        config,
        side,
        cells,
        agent_pos: (agent_cell / side, agent_cell % side),
        agent_dir,
        carried: None,
        step: 0,
        rng_seed: seed,
    })
}

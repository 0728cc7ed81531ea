use super::{codes, Cell, GridState};

pub const VIEW_SIZE: usize = 7;
pub const VIEW_CHANNELS: usize = 3;
pub const VIEW_CELLS: usize = VIEW_SIZE * VIEW_SIZE * VIEW_CHANNELS;

/// Egocentric 7x7x3 view. The agent sits at row 6, column 3, facing toward
/// row 0. Channels are object kind, color and door state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observation([u8; VIEW_CELLS]);

impl Observation {
    pub const AGENT: (usize, usize) = (VIEW_SIZE - 1, VIEW_SIZE / 2);

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * VIEW_SIZE + col) * VIEW_CHANNELS;
        [self.0[i], self.0[i + 1], self.0[i + 2]]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (VIEW_SIZE, VIEW_SIZE, VIEW_CHANNELS)
    }

    fn set(&mut self, row: usize, col: usize, code: [u8; 3]) {
        let i = (row * VIEW_SIZE + col) * VIEW_CHANNELS;
        self.0[i..i + 3].copy_from_slice(&code);
    }
}

impl GridState {
    /// World position of a view cell, as signed coordinates (may be off-grid).
    pub fn view_to_world(&self, view_row: usize, view_col: usize) -> (isize, isize) {
        let ahead = (VIEW_SIZE - 1 - view_row) as isize;
        let lateral = view_col as isize - (VIEW_SIZE / 2) as isize;
        let (fr, fc) = self.agent_dir().offset();
        let (rr, rc) = self.agent_dir().right().offset();
        let (ar, ac) = self.agent_pos();
        (
            ar as isize + ahead * fr + lateral * rr,
            ac as isize + ahead * fc + lateral * rc,
        )
    }

    pub fn observe(&self) -> Observation {
        let mut cells = [[Cell::Wall; VIEW_SIZE]; VIEW_SIZE];
        for (r, row) in cells.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let (wr, wc) = self.view_to_world(r, c);
                *cell = self.cell_at(wr, wc);
            }
        }
        let visible = visibility(&cells);
        let mut obs = Observation([0; VIEW_CELLS]);
        for r in 0..VIEW_SIZE {
            for c in 0..VIEW_SIZE {
                if !visible[r][c] {
                    obs.set(r, c, [codes::UNSEEN, 0, 0]);
                } else if (r, c) == Observation::AGENT {
                    let code = match self.carried() {
                        Some((color, kind)) => Cell::Object { kind, color }.encode(),
                        None => Cell::Empty.encode(),
                    };
                    obs.set(r, c, code);
                } else {
                    obs.set(r, c, cells[r][c].encode());
                }
            }
        }
        obs
    }
}

/// Line-of-sight mask: sweep rows away from the agent, spreading sideways and
/// forward through transparent cells. Opaque cells are themselves visible but
/// stop propagation.
fn visibility(cells: &[[Cell; VIEW_SIZE]; VIEW_SIZE]) -> [[bool; VIEW_SIZE]; VIEW_SIZE] {
    let mut mask = [[false; VIEW_SIZE]; VIEW_SIZE];
    let (ar, ac) = Observation::AGENT;
    mask[ar][ac] = true;
    for r in (0..VIEW_SIZE).rev() {
        for c in 0..VIEW_SIZE - 1 {
            if !mask[r][c] || (cells[r][c].is_opaque() && (r, c) != (ar, ac)) {
                continue;
            }
            mask[r][c + 1] = true;
            if r > 0 {
                mask[r - 1][c + 1] = true;
                mask[r - 1][c] = true;
            }
        }
        for c in (1..VIEW_SIZE).rev() {
            if !mask[r][c] || (cells[r][c].is_opaque() && (r, c) != (ar, ac)) {
                continue;
            }
            mask[r][c - 1] = true;
            if r > 0 {
                mask[r - 1][c - 1] = true;
                mask[r - 1][c] = true;
            }
        }
    }
    mask
}

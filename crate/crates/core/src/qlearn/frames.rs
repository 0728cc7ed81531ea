use crate::envgrid::{codes, Observation, VIEW_CELLS, VIEW_CHANNELS};

use super::real::Real;

/// The last `k` observations, oldest first, zero-padded until `k` have been
/// pushed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameStack {
    k: usize,
    data: Vec<u8>,
}

impl FrameStack {
    pub fn new(k: usize) -> Self {
        assert!(k > 0, "frame stack needs at least one frame");
        FrameStack {
            k,
            data: vec![0; k * VIEW_CELLS],
        }
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn push(&mut self, obs: &Observation) {
        self.data.copy_within(VIEW_CELLS.., 0);
        let start = self.data.len() - VIEW_CELLS;
        self.data[start..].copy_from_slice(obs.as_slice());
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn to_boxed(&self) -> Box<[u8]> {
        self.data.clone().into_boxed_slice()
    }

    pub fn flat_len(k: usize) -> usize {
        k * VIEW_CELLS
    }
}

/// Writes the network input for stacked frames plus a goal vector into `out`.
/// Each channel is scaled to roughly `[0, 1]`.
pub fn encode_input<T: Real>(frames: &[u8], goal: &[f32], out: &mut [T]) {
    assert_eq!(out.len(), frames.len() + goal.len());
    const SCALE: [f64; VIEW_CHANNELS] = [1.0 / codes::MAX_KIND as f64, 1.0 / 5.0, 1.0 / 3.0];
    for (i, (&f, o)) in frames.iter().zip(out.iter_mut()).enumerate() {
        *o = T::of(f as f64 * SCALE[i % VIEW_CHANNELS]);
    }
    for (&g, o) in goal.iter().zip(out[frames.len()..].iter_mut()) {
        *o = T::of(g as f64);
    }
}

pub fn input_vector<T: Real>(frames: &[u8], goal: &[f32]) -> Vec<T> {
    let mut out = vec![T::zero(); frames.len() + goal.len()];
    encode_input(frames, goal, &mut out);
    out
}

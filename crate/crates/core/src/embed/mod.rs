//! Goal representations. Providers implement [`GoalEmbedder`] and are
//! constructed by name through an [`EmbedderRegistry`].

mod providers;
mod registry;

use serde::{Deserialize, Serialize};

use crate::envgrid::Event;

pub use providers::{embed_text, load_embedding_file, onehot, FileEmbedder, HashedBowEmbedder, OneHotEmbedder};
pub use registry::{EmbedderMaker, EmbedderRegistry};

use crate::error::Result;
use crate::instructor::Instruction;

/// Fixed-length goal vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding(pub Vec<f32>);

impl Embedding {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }
}

/// Euclidean distance between two embeddings of equal length.
pub fn distance(a: &Embedding, b: &Embedding) -> f64 {
    assert_eq!(a.dim(), b.dim(), "embedding dimensions differ");
    a.0.iter()
        .zip(&b.0)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// The ordered event vocabulary that one-hot goals index into.
pub fn vocab() -> Vec<Event> {
    Event::vocabulary()
}

/// Configuration naming a provider and its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedderSpec {
    pub kind: String,
    pub dim: usize,
    pub file: Option<std::path::PathBuf>,
}

impl EmbedderSpec {
    pub fn onehot() -> Self {
        EmbedderSpec {
            kind: OneHotEmbedder::NAME.into(),
            dim: vocab().len(),
            file: None,
        }
    }

    pub fn hashed_bow(dim: usize) -> Self {
        EmbedderSpec {
            kind: HashedBowEmbedder::NAME.into(),
            dim,
            file: None,
        }
    }
}

/// Maps an instruction to its goal vector. Providers are pure and immutable.
pub trait GoalEmbedder: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Whether the provider reads the instruction text. One-hot goals only
    /// see the event, so synonyms collapse onto one vector.
    fn reads_text(&self) -> bool {
        true
    }

    fn embed(&self, instruction: &Instruction) -> Result<Embedding>;
}

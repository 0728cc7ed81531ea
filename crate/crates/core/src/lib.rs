pub mod envgrid;
pub mod embed;
pub mod instructor;
pub mod qlearn;
pub mod orchestrator;
pub mod evalkit;
pub mod pipeline;
pub mod error;
pub mod seed;

pub use error::{GlideError, Result};

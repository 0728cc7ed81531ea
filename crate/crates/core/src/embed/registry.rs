use std::collections::BTreeMap;

use super::{EmbedderSpec, FileEmbedder, GoalEmbedder, HashedBowEmbedder, OneHotEmbedder};
use crate::error::{GlideError, Result};

pub type EmbedderMaker = fn(&EmbedderSpec) -> Result<Box<dyn GoalEmbedder>>;

/// Name-keyed constructors for goal embedders.
#[derive(Clone)]
pub struct EmbedderRegistry {
    makers: BTreeMap<String, EmbedderMaker>,
}

fn make_onehot(spec: &EmbedderSpec) -> Result<Box<dyn GoalEmbedder>> {
    let e = OneHotEmbedder;
    if spec.dim != e.dim() {
        return Err(GlideError::Config(format!(
            "onehot_event has dim {}, config says {}",
            e.dim(),
            spec.dim
        )));
    }
    Ok(Box::new(e))
}

fn make_hashed(spec: &EmbedderSpec) -> Result<Box<dyn GoalEmbedder>> {
    Ok(Box::new(HashedBowEmbedder::new(spec.dim)?))
}

fn make_file(spec: &EmbedderSpec) -> Result<Box<dyn GoalEmbedder>> {
    let path = spec
        .file
        .as_ref()
        .ok_or_else(|| GlideError::Config("file_lookup embedder needs a file path".into()))?;
    let e = super::load_embedding_file(path)?;
    if e.dim() != spec.dim {
        return Err(GlideError::Format(format!(
            "embedding file has dim {}, config says {}",
            e.dim(),
            spec.dim
        )));
    }
    Ok(Box::new(e))
}

impl EmbedderRegistry {
    pub fn empty() -> Self {
        EmbedderRegistry {
            makers: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(OneHotEmbedder::NAME, make_onehot);
        r.register(HashedBowEmbedder::NAME, make_hashed);
        r.register(FileEmbedder::NAME, make_file);
        r
    }

    pub fn register(&mut self, name: &str, maker: EmbedderMaker) -> &mut Self {
        self.makers.insert(name.to_owned(), maker);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.makers.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &EmbedderSpec) -> Result<Box<dyn GoalEmbedder>> {
        let maker = self.makers.get(&spec.kind).ok_or_else(|| {
            GlideError::Config(format!(
                "unknown embedder {:?}; known: {}",
                spec.kind,
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        maker(spec)
    }
}

impl Default for EmbedderRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

use std::collections::HashMap;
use std::path::Path;

use super::{vocab, Embedding, GoalEmbedder};
use crate::envgrid::Event;
use crate::error::{GlideError, Result};
use crate::instructor::Instruction;

/// Basis vector for `event` over the event vocabulary (48 dimensions).
pub fn onehot(event: Event) -> Result<Embedding> {
    let vocab = vocab();
    let i = vocab
        .binary_search(&event)
        .map_err(|_| GlideError::Lookup(format!("{event} is not in the vocabulary")))?;
    let mut v = vec![0.0; vocab.len()];
    v[i] = 1.0;
    Ok(Embedding(v))
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hashed bag of words: lowercase, split on non-alphanumerics, FNV-1a each
/// token into `dim` buckets, then L2-normalize.
pub fn embed_text(text: &str, dim: usize) -> Result<Embedding> {
    if dim == 0 {
        return Err(GlideError::Config("embedding dimension must be positive".into()));
    }
    let lower = text.to_lowercase();
    let mut counts = vec![0.0f64; dim];
    let mut tokens = 0usize;
    for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        counts[(fnv1a64(token.as_bytes()) % dim as u64) as usize] += 1.0;
        tokens += 1;
    }
    if tokens == 0 {
        return Err(GlideError::Input(format!("no tokens in {text:?}")));
    }
    let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(Embedding(counts.iter().map(|c| (c / norm) as f32).collect()))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OneHotEmbedder;

impl OneHotEmbedder {
    pub const NAME: &'static str = "onehot_event";
}

impl GoalEmbedder for OneHotEmbedder {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn dim(&self) -> usize {
        vocab().len()
    }

    fn reads_text(&self) -> bool {
        false
    }

    fn embed(&self, instruction: &Instruction) -> Result<Embedding> {
        onehot(instruction.event)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HashedBowEmbedder {
    dim: usize,
}

impl HashedBowEmbedder {
    pub const NAME: &'static str = "hashed_bow";
    pub const MIN_DIM: usize = 16;

    pub fn new(dim: usize) -> Result<Self> {
        if dim < Self::MIN_DIM {
            return Err(GlideError::Config(format!(
                "hashed_bow needs dim >= {}, got {dim}",
                Self::MIN_DIM
            )));
        }
        Ok(HashedBowEmbedder { dim })
    }
}

impl GoalEmbedder for HashedBowEmbedder {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, instruction: &Instruction) -> Result<Embedding> {
        embed_text(&instruction.text, self.dim)
    }
}

/// Exact-match table of precomputed vectors.
#[derive(Clone, Debug)]
pub struct FileEmbedder {
    dim: usize,
    table: HashMap<String, Vec<f32>>,
}

impl FileEmbedder {
    pub const NAME: &'static str = "file_lookup";

    /// Parses the TSV format: a `dim<TAB>D` header, then
    /// `text<TAB>v1,v2,...,vD` per line.
    pub fn parse(text: &str) -> Result<FileEmbedder> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| GlideError::Format("embedding file is empty".into()))?;
        let dim = match header.split_once('\t') {
            Some(("dim", d)) => d
                .trim()
                .parse::<usize>()
                .map_err(|e| GlideError::Format(format!("bad dim header: {e}")))?,
            _ => return Err(GlideError::Format(format!("expected 'dim<TAB>D' header, got {header:?}"))),
        };
        if dim == 0 {
            return Err(GlideError::Format("dim must be positive".into()));
        }
        let mut table = HashMap::new();
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let lineno = n + 2;
            let (key, values) = line
                .rsplit_once('\t')
                .ok_or_else(|| GlideError::Format(format!("line {lineno}: missing tab")))?;
            let v = values
                .split(',')
                .map(|x| x.trim().parse::<f32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| GlideError::Format(format!("line {lineno}: {e}")))?;
            if v.len() != dim {
                return Err(GlideError::Format(format!(
                    "line {lineno}: {} values, header says {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GlideError::Format(format!("line {lineno}: non-finite value")));
            }
            if table.insert(key.to_owned(), v).is_some() {
                return Err(GlideError::Format(format!("line {lineno}: duplicate key {key:?}")));
            }
        }
        Ok(FileEmbedder { dim, table })
    }

    pub fn lookup(&self, text: &str) -> Result<Embedding> {
        self.table
            .get(text)
            .map(|v| Embedding(v.clone()))
            .ok_or_else(|| GlideError::Lookup(format!("no embedding for {text:?}")))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl GoalEmbedder for FileEmbedder {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, instruction: &Instruction) -> Result<Embedding> {
        self.lookup(&instruction.text)
    }
}

pub fn load_embedding_file(path: &Path) -> Result<FileEmbedder> {
    let text = std::fs::read_to_string(path).map_err(|e| GlideError::io(path, e))?;
    FileEmbedder::parse(&text)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fnv_reference_values() {
        assert_eq!(super::fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(super::fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(super::fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{gen_synonyms, SynonymSet};
use crate::envgrid::Event;
use crate::error::{GlideError, Result};
use crate::seed::{derive_seed, Stream};

/// Optional first line of a synonym file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbHeader {
    pub config_hash: String,
    pub m: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Line {
    Header { header: DbHeader },
    Set(SynonymSet),
}

/// Synonym sets for the whole event vocabulary. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynonymDb {
    sets: BTreeMap<Event, SynonymSet>,
    header: Option<DbHeader>,
}

impl SynonymDb {
    pub fn generate(m: usize, seed: u64) -> Result<SynonymDb> {
        let sets = Event::vocabulary()
            .into_iter()
            .enumerate()
            .map(|(i, e)| Ok((e, gen_synonyms(e, m, derive_seed(seed, Stream::Synonyms, i as u64))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let db = SynonymDb { sets, header: None };
        db.validate()?;
        Ok(db)
    }

    pub fn from_sets(sets: impl IntoIterator<Item = SynonymSet>) -> Result<SynonymDb> {
        let mut map = BTreeMap::new();
        for set in sets {
            let event = set.event;
            if map.insert(event, set).is_some() {
                return Err(GlideError::Format(format!("event {event} listed twice")));
            }
        }
        let db = SynonymDb {
            sets: map,
            header: None,
        };
        db.validate()?;
        Ok(db)
    }

    pub fn with_header(mut self, header: DbHeader) -> Self {
        self.header = Some(header);
        self
    }

    pub fn header(&self) -> Option<&DbHeader> {
        self.header.as_ref()
    }

    pub fn get(&self, event: Event) -> Result<&SynonymSet> {
        self.sets
            .get(&event)
            .ok_or_else(|| GlideError::Lookup(format!("no synonyms for {event}")))
    }

    pub fn sets(&self) -> impl Iterator<Item = &SynonymSet> {
        self.sets.values()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Per-set invariants, full vocabulary coverage and cross-event uniqueness.
    pub fn validate(&self) -> Result<()> {
        for set in self.sets.values() {
            set.validate()?;
        }
        for e in Event::vocabulary() {
            if !self.sets.contains_key(&e) {
                return Err(GlideError::Format(format!("synonym DB does not cover {e}")));
            }
        }
        let mut owner: HashMap<&str, Event> = HashMap::new();
        for set in self.sets.values() {
            for s in set.iter() {
                if let Some(other) = owner.insert(s, set.event) {
                    return Err(GlideError::Format(format!(
                        "instruction {s:?} shared by {other} and {}",
                        set.event
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        if let Some(header) = &self.header {
            out.push_str(&serde_json::to_string(&Line::Header { header: header.clone() }).unwrap());
            out.push('\n');
        }
        for set in self.sets.values() {
            out.push_str(&serde_json::to_string(set).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<SynonymDb> {
        let mut header = None;
        let mut sets = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(line)
                .map_err(|e| GlideError::Format(format!("synonym file line {}: {e}", n + 1)))?;
            match parsed {
                Line::Header { header: h } if sets.is_empty() && header.is_none() => header = Some(h),
                Line::Header { .. } => {
                    return Err(GlideError::Format(format!(
                        "synonym file line {}: header must come first",
                        n + 1
                    )))
                }
                Line::Set(set) => sets.push(set),
            }
        }
        let mut db = SynonymDb::from_sets(sets)?;
        db.header = header;
        Ok(db)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| GlideError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<SynonymDb> {
        let text = std::fs::read_to_string(path).map_err(|e| GlideError::io(path, e))?;
        SynonymDb::from_jsonl(&text)
    }
}

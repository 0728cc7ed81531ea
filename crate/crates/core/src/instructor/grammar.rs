//! Template grammar for synonymous instructions: `{verb} the {color} {noun}`.
//!
//! Verb phrases are disjoint across event kinds, color words across colors and
//! nouns across object kinds, and no entry contains " the ", so every
//! generated string parses back to exactly one event.

use crate::envgrid::{Color, Event, EventKind, ObjKind};

pub fn verbs(kind: EventKind) -> &'static [&'static str] {
    match kind {
        EventKind::Facing => &[
            "go to",
            "walk to",
            "approach",
            "navigate to",
            "head to",
            "move to",
            "reach",
            "proceed to",
            "travel to",
            "step to",
        ],
        EventKind::Holding => &[
            "pick up",
            "lift up",
            "grab",
            "take",
            "collect",
            "fetch",
            "grasp",
            "seize",
            "get",
            "retrieve",
        ],
        EventKind::Opened => &[
            "open",
            "swing open",
            "pull open",
            "push open",
            "throw open",
            "unseal",
            "unbar",
            "unlatch",
            "prise open",
            "crack open",
        ],
    }
}

pub fn color_words(color: Color) -> &'static [&'static str] {
    match color {
        Color::Red => &["red", "crimson", "scarlet", "ruby"],
        Color::Green => &["green", "emerald", "lime", "jade"],
        Color::Blue => &["blue", "azure", "navy", "cobalt"],
        Color::Grey => &["grey", "gray", "silver", "ash"],
        Color::Purple => &["purple", "violet", "lilac", "plum"],
        Color::Yellow => &["yellow", "golden", "amber", "lemon"],
    }
}

pub fn nouns(kind: ObjKind) -> &'static [&'static str] {
    match kind {
        ObjKind::Ball => &["ball", "sphere", "orb"],
        ObjKind::Box => &["box", "crate", "chest"],
        ObjKind::Key => &["key", "latchkey", "passkey"],
        ObjKind::Door => &["door", "doorway", "gate"],
    }
}

/// Number of distinct instructions the grammar can produce for `event`.
pub fn capacity(event: Event) -> usize {
    verbs(event.kind()).len() * color_words(event.color()).len() * nouns(event.obj()).len()
}

/// The `index`-th combination in verb-major order; index 0 is the root.
pub fn phrase(event: Event, index: usize) -> String {
    let v = verbs(event.kind());
    let c = color_words(event.color());
    let n = nouns(event.obj());
    let noun = n[index % n.len()];
    let color = c[(index / n.len()) % c.len()];
    let verb = v[index / (n.len() * c.len())];
    format!("{verb} the {color} {noun}")
}

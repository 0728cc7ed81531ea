use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::types::{Color, ObjKind};
use crate::error::{GlideError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Facing,
    Holding,
    Opened,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [EventKind::Facing, EventKind::Holding, EventKind::Opened];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Facing => "FACING",
            EventKind::Holding => "HOLDING",
            EventKind::Opened => "OPENED",
        }
    }

    /// Object kinds this event kind can refer to.
    pub fn objects(self) -> &'static [ObjKind] {
        match self {
            EventKind::Facing => &ObjKind::ALL,
            EventKind::Holding => &ObjKind::PORTABLE,
            EventKind::Opened => &[ObjKind::Door],
        }
    }
}

impl FromStr for EventKind {
    type Err = GlideError;

    fn from_str(s: &str) -> Result<Self> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GlideError::Input(format!("unknown event kind {s:?}")))
    }
}

/// A triggerable happening: the atomic goal unit.
///
/// The derived ordering is kind-major, then color, then object kind, which is
/// also the order of the event vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    kind: EventKind,
    color: Color,
    obj: ObjKind,
}

impl Event {
    pub fn new(kind: EventKind, color: Color, obj: ObjKind) -> Result<Event> {
        if !kind.objects().contains(&obj) {
            return Err(GlideError::Input(format!(
                "{} cannot refer to a {}",
                kind.name(),
                obj.name()
            )));
        }
        Ok(Event { kind, color, obj })
    }

    pub fn facing(color: Color, obj: ObjKind) -> Event {
        Event {
            kind: EventKind::Facing,
            color,
            obj,
        }
    }

    /// Panics if `obj` is a door.
    pub fn holding(color: Color, obj: ObjKind) -> Event {
        assert!(obj.is_portable(), "doors cannot be held");
        Event {
            kind: EventKind::Holding,
            color,
            obj,
        }
    }

    pub fn opened(color: Color) -> Event {
        Event {
            kind: EventKind::Opened,
            color,
            obj: ObjKind::Door,
        }
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn obj(&self) -> ObjKind {
        self.obj
    }

    /// Every valid event, in canonical order: 24 FACING, 18 HOLDING, 6 OPENED.
    pub fn vocabulary() -> Vec<Event> {
        let mut out = Vec::with_capacity(48);
        for kind in EventKind::ALL {
            for color in Color::ALL {
                for &obj in kind.objects() {
                    out.push(Event { kind, color, obj });
                }
            }
        }
        out
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind.name(), self.color, self.obj)
    }
}

impl FromStr for Event {
    type Err = GlideError;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let (Some(kind), Some(color), Some(obj), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(GlideError::Input(format!("malformed event {s:?}")));
        };
        Event::new(kind.parse()?, color.parse()?, obj.parse()?)
    }
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which event kinds the simulator reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventMask {
    pub facing: bool,
    pub holding: bool,
    pub opened: bool,
}

impl EventMask {
    pub const ALL: EventMask = EventMask {
        facing: true,
        holding: true,
        opened: true,
    };

    pub fn allows(&self, kind: EventKind) -> bool {
        match kind {
            EventKind::Facing => self.facing,
            EventKind::Holding => self.holding,
            EventKind::Opened => self.opened,
        }
    }

    pub fn parse_list(s: &str) -> Result<EventMask> {
        let mut mask = EventMask {
            facing: false,
            holding: false,
            opened: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<EventKind>()? {
                EventKind::Facing => mask.facing = true,
                EventKind::Holding => mask.holding = true,
                EventKind::Opened => mask.opened = true,
            }
        }
        if mask == (EventMask { facing: false, holding: false, opened: false }) {
            return Err(GlideError::Config("event kind list is empty".into()));
        }
        Ok(mask)
    }

    pub fn to_list(&self) -> String {
        EventKind::ALL
            .into_iter()
            .filter(|k| self.allows(*k))
            .map(EventKind::name)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl Default for EventMask {
    fn default() -> Self {
        EventMask::ALL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_shape() {
        let v = Event::vocabulary();
        assert_eq!(v.len(), 48);
        assert_eq!(v[0].to_string(), "FACING:red:ball");
        assert_eq!(v.iter().filter(|e| e.kind() == EventKind::Facing).count(), 24);
        assert_eq!(v.iter().filter(|e| e.kind() == EventKind::Holding).count(), 18);
        assert_eq!(v.iter().filter(|e| e.kind() == EventKind::Opened).count(), 6);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, v);
    }

    #[test]
    fn string_round_trip_over_vocabulary() {
        for e in Event::vocabulary() {
            assert_eq!(e.to_string().parse::<Event>().unwrap(), e);
        }
    }

    #[test]
    fn rejects_invalid_events() {
        assert!("HOLDING:red:door".parse::<Event>().is_err());
        assert!("OPENED:red:ball".parse::<Event>().is_err());
        assert!("FACING:red".parse::<Event>().is_err());
        assert!("FACING:pink:ball".parse::<Event>().is_err());
        assert!("FACING:red:ball:x".parse::<Event>().is_err());
    }
}

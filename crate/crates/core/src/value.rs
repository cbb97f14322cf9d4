//! Points of the extended state space `[lo, 1] ∪ {∞}`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real value or the distinguished maximal point `∞`.
///
/// `∞` is a tag, not an IEEE infinity, so that ordering and equality are
/// explicit. Every finite value compares strictly below `Infinity`.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedValue {
    Finite(f64),
    Infinity,
}

pub use ExtendedValue::{Finite, Infinity};

impl ExtendedValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(x) => Some(x),
            Infinity => None,
        }
    }

    /// Real embedding with `∞` mapped to `f64::INFINITY`; used for sorting keys.
    pub fn to_f64(self) -> f64 {
        match self {
            Finite(x) => x,
            Infinity => f64::INFINITY,
        }
    }

    /// Parses `"inf"` (also `"∞"`, `"infinity"`) or a decimal real.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "+inf" => Some(Infinity),
            _ => t.parse::<f64>().ok().filter(|x| x.is_finite()).map(Finite),
        }
    }
}

impl From<f64> for ExtendedValue {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Infinity
        } else {
            Finite(x)
        }
    }
}

impl PartialEq for ExtendedValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedValue {}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (Finite(_), Infinity) => Ordering::Less,
            (Infinity, Finite(_)) => Ordering::Greater,
            (Infinity, Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(x) => write!(f, "{x}"),
            Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(x) => s.serialize_f64(*x),
            Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedValue;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Self::Value, E> {
                Ok(Finite(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Self::Value, E> {
                Ok(Finite(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Self::Value, E> {
                Ok(Finite(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Self::Value, E> {
                ExtendedValue::parse(s).ok_or_else(|| E::custom(format!("bad value {s:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

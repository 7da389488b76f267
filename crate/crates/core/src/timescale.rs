//! Times on the extended positive reals.
//!
//! Decoherence-free pairs and zero-temperature baths produce infinite
//! timescales; these are ordinary outcomes, so they get their own variant
//! instead of an `f64::INFINITY` that would leak into JSON as `null`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Timescale {
    Finite(f64),
    Infinite,
}

impl Timescale {
    /// Timescale whose inverse is `rate`. A zero rate maps to `Infinite`.
    pub fn from_rate(rate: f64) -> Self {
        if rate == 0.0 {
            Timescale::Infinite
        } else if rate.is_infinite() {
            Timescale::Finite(0.0)
        } else {
            Timescale::Finite(1.0 / rate)
        }
    }

    pub fn rate(self) -> f64 {
        match self {
            Timescale::Finite(t) => 1.0 / t,
            Timescale::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Timescale::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Timescale::Finite(t) => Some(t),
            Timescale::Infinite => None,
        }
    }

    /// `f64` view, with `Infinite` as `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Harmonic combination `1/τ = 1/τ_a + 1/τ_b` on the extended reals.
    pub fn harmonic(self, other: Timescale) -> Timescale {
        match (self, other) {
            (Timescale::Infinite, Timescale::Infinite) => Timescale::Infinite,
            (Timescale::Infinite, t) | (t, Timescale::Infinite) => t,
            (Timescale::Finite(a), Timescale::Finite(b)) => Timescale::Finite(a * b / (a + b)),
        }
    }
}

impl fmt::Display for Timescale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timescale::Finite(t) => write!(f, "{t}"),
            Timescale::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Number(f64),
    Tag(String),
}

impl Serialize for Timescale {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Timescale::Finite(t) => Repr::Number(*t),
            Timescale::Infinite => Repr::Tag("inf".into()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Timescale {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Number(t) => Ok(Timescale::Finite(t)),
            Repr::Tag(s) if s == "inf" => Ok(Timescale::Infinite),
            Repr::Tag(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

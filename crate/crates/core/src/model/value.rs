use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

/// An observed outcome label. Equality is exact string equality; the crate
/// never interprets a label beyond the prefixes it itself assigns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub String);

impl Outcome {
    pub fn new(s: impl Into<String>) -> Self {
        Outcome(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Outcome {
    fn from(s: &str) -> Self {
        Outcome(s.to_owned())
    }
}

/// A box value: a nonnegative rational, or an "infinite" sentinel carrying a
/// tag. Sentinels exceed every finite value and differ from one another only
/// by tag, which is what lets them encode branching information.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Q),
    InfTagged(String),
}

impl Value {
    pub fn finite(q: Q) -> Self {
        Value::Finite(q)
    }

    pub fn inf(tag: impl Into<String>) -> Self {
        Value::InfTagged(tag.into())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            Value::Finite(q) => Some(q),
            Value::InfTagged(_) => None,
        }
    }

    /// Magnitude order: all sentinels tie, and beat every finite value.
    pub fn magnitude_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::InfTagged(_)) => Ordering::Less,
            (Value::InfTagged(_), Value::Finite(_)) => Ordering::Greater,
            (Value::InfTagged(_), Value::InfTagged(_)) => Ordering::Equal,
        }
    }

    /// True for a finite value `<= t`.
    pub fn at_most(&self, t: &Q) -> bool {
        matches!(self, Value::Finite(v) if v <= t)
    }

    /// The branching label a policy sees when this value is revealed.
    pub fn label(&self) -> Outcome {
        Outcome(self.to_string())
    }

    pub fn parse(s: &str) -> Result<Value> {
        let s = s.trim();
        if let Some(tag) = s.strip_prefix("inf:") {
            if tag.chars().any(char::is_whitespace) {
                return Err(Error::Parse(format!("whitespace in infinity tag {tag:?}")));
            }
            return Ok(Value::InfTagged(tag.to_owned()));
        }
        let q = parse_q(s)?;
        Ok(Value::Finite(q))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(q) => f.write_str(&fmt_q(q)),
            Value::InfTagged(tag) => write!(f, "inf:{tag}"),
        }
    }
}

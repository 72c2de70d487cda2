use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const ID_PREFIX: &str = "STRONG:";
const ID_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("invalid concept id {0:?}: expected STRONG: followed by six digits")]
    Concept(String),
    #[error("invalid UMLS CUI {0:?}: expected C followed by seven digits")]
    Cui(String),
}

/// Concept identifier of the form `STRONG:NNNNNN`.
///
/// Fixed width, so lexicographic order equals numeric order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(String);

impl ConceptId {
    pub fn parse(s: &str) -> Result<Self, IdError> {
        let digits = s
            .strip_prefix(ID_PREFIX)
            .ok_or_else(|| IdError::Concept(s.to_string()))?;
        if digits.len() != ID_DIGITS || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IdError::Concept(s.to_string()));
        }
        Ok(ConceptId(s.to_string()))
    }

    /// Builds the id for `n`; panics if `n` does not fit in six digits.
    pub fn from_number(n: u32) -> Self {
        assert!(n < 1_000_000, "concept number {n} exceeds six digits");
        ConceptId(format!("{ID_PREFIX}{n:06}"))
    }

    pub fn number(&self) -> u32 {
        self.0[ID_PREFIX.len()..]
            .parse()
            .expect("validated at construction")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ConceptId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConceptId::parse(s)
    }
}

impl Serialize for ConceptId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ConceptId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ConceptId::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// UMLS Concept Unique Identifier, `C` followed by seven digits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cui(String);

impl Cui {
    pub fn parse(s: &str) -> Result<Self, IdError> {
        let digits = s
            .strip_prefix('C')
            .ok_or_else(|| IdError::Cui(s.to_string()))?;
        if digits.len() != 7 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IdError::Cui(s.to_string()));
        }
        Ok(Cui(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Cui {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Cui {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Cui {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Cui::parse(&s).map_err(serde::de::Error::custom)
    }
}

//! Answer vocabularies of the membership and comparison oracles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Answer of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MemLabel {
    #[serde(rename = "in")]
    Member,
    #[serde(rename = "out")]
    NonMember,
}

impl MemLabel {
    pub fn from_bool(member: bool) -> Self {
        if member {
            MemLabel::Member
        } else {
            MemLabel::NonMember
        }
    }

    pub fn is_member(self) -> bool {
        self == MemLabel::Member
    }

    pub fn flipped(self) -> Self {
        Self::from_bool(!self.is_member())
    }

    pub fn token(self) -> &'static str {
        match self {
            MemLabel::Member => "in",
            MemLabel::NonMember => "out",
        }
    }
}

impl fmt::Display for MemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MemLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "in" => Ok(MemLabel::Member),
            "out" => Ok(MemLabel::NonMember),
            other => Err(Error::malformed("membership label", other)),
        }
    }
}

/// Answer of a comparison query `C(x, y)`.
///
/// `Less` reads "x ≺ y": y is strictly preferred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrefLabel {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "=")]
    Equiv,
    #[serde(rename = "||")]
    Incomparable,
}

impl PrefLabel {
    pub const ALL: [PrefLabel; 4] = [
        PrefLabel::Less,
        PrefLabel::Greater,
        PrefLabel::Equiv,
        PrefLabel::Incomparable,
    ];

    /// The label for the swapped pair `C(y, x)`.
    pub fn reversed(self) -> Self {
        match self {
            PrefLabel::Less => PrefLabel::Greater,
            PrefLabel::Greater => PrefLabel::Less,
            other => other,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            PrefLabel::Less => "<",
            PrefLabel::Greater => ">",
            PrefLabel::Equiv => "=",
            PrefLabel::Incomparable => "||",
        }
    }

    /// Whether membership values `(φ(x), φ(y))` respect this label.
    pub fn admits(self, x: bool, y: bool) -> bool {
        match self {
            PrefLabel::Less => x <= y,
            PrefLabel::Greater => x >= y,
            PrefLabel::Equiv => x == y,
            PrefLabel::Incomparable => true,
        }
    }
}

impl fmt::Display for PrefLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for PrefLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "<" => Ok(PrefLabel::Less),
            ">" => Ok(PrefLabel::Greater),
            "=" => Ok(PrefLabel::Equiv),
            "||" => Ok(PrefLabel::Incomparable),
            other => Err(Error::malformed("preference label", other)),
        }
    }
}

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmKind {
    #[serde(rename = "mem")]
    Membership,
    #[serde(rename = "pref")]
    Preference,
}

impl ArmKind {
    pub const BOTH: [ArmKind; 2] = [ArmKind::Membership, ArmKind::Preference];

    pub fn index(self) -> usize {
        match self {
            ArmKind::Membership => 0,
            ArmKind::Preference => 1,
        }
    }
}

impl fmt::Display for ArmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArmKind::Membership => "mem",
            ArmKind::Preference => "pref",
        })
    }
}

/// Per-query costs `a` (membership) and `b` (preference). An infinite cost
/// removes that query type altogether.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostRepr", into = "CostRepr")]
pub struct CostModel {
    a: f64,
    b: f64,
}

impl CostModel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::parameter(name, v, "(0, ∞]"));
            }
        }
        if a.is_infinite() && b.is_infinite() {
            return Err(Error::parameter("a, b", "∞", "at least one finite"));
        }
        Ok(CostModel { a, b })
    }

    pub fn mem(&self) -> f64 {
        self.a
    }

    pub fn pref(&self) -> f64 {
        self.b
    }

    pub fn cost(&self, kind: ArmKind) -> f64 {
        match kind {
            ArmKind::Membership => self.a,
            ArmKind::Preference => self.b,
        }
    }

    pub fn allows(&self, kind: ArmKind) -> bool {
        self.cost(kind).is_finite()
    }

    pub fn max_finite(&self) -> f64 {
        [self.a, self.b]
            .into_iter()
            .filter(|c| c.is_finite())
            .fold(0.0, f64::max)
    }

    /// `c / max(a, b) · after / before`, clamped to `[0, 1]`.
    pub fn loss(&self, kind: ArmKind, before: usize, after: usize) -> f64 {
        let frac = after as f64 / before.max(1) as f64;
        (self.cost(kind) / self.max_finite() * frac).clamp(0.0, 1.0)
    }

    /// `a · #mem + b · #pref`, where an unused infinite-cost type adds nothing.
    pub fn total(&self, n_mem: usize, n_pref: usize) -> f64 {
        let term = |c: f64, n: usize| if n == 0 { 0.0 } else { c * n as f64 };
        term(self.a, n_mem) + term(self.b, n_pref)
    }
}

#[derive(Serialize, Deserialize)]
struct CostRepr {
    #[serde(serialize_with = "ser_cost", deserialize_with = "de_cost")]
    a: f64,
    #[serde(serialize_with = "ser_cost", deserialize_with = "de_cost")]
    b: f64,
}

impl TryFrom<CostRepr> for CostModel {
    type Error = Error;

    fn try_from(r: CostRepr) -> Result<Self> {
        CostModel::new(r.a, r.b)
    }
}

impl From<CostModel> for CostRepr {
    fn from(c: CostModel) -> Self {
        CostRepr { a: c.a, b: c.b }
    }
}

fn ser_cost<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_cost<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) => parse_cost(&t).map_err(serde::de::Error::custom),
    }
}

/// Parses a cost, accepting `inf` / `∞` for an excluded query type.
pub fn parse_cost(text: &str) -> Result<f64> {
    match text.trim() {
        "inf" | "Inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::malformed("cost", t)),
    }
}

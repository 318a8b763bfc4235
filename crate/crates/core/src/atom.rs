//! Atoms of a universe: finite words over an alphabet, or points of `[0, 1]^d`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Exact coordinate of a feature point.
pub type Coord = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Word(Vec<Symbol>),
    Point(Vec<Coord>),
}

impl Atom {
    pub fn word(symbols: impl Into<Vec<Symbol>>) -> Self {
        Atom::Word(symbols.into())
    }

    pub fn as_word(&self) -> Result<&[Symbol]> {
        match self {
            Atom::Word(w) => Ok(w),
            Atom::Point(_) => Err(Error::WrongAtomKind { expected: "word" }),
        }
    }

    pub fn as_point(&self) -> Result<&[Coord]> {
        match self {
            Atom::Point(p) => Ok(p),
            Atom::Word(_) => Err(Error::WrongAtomKind { expected: "point" }),
        }
    }

    /// Stable 64-bit fingerprint, independent of the process and platform.
    pub fn fingerprint(&self, seed: u64) -> u64 {
        let mut h = splitmix(seed ^ 0x243f_6a88_85a3_08d3);
        match self {
            Atom::Word(w) => {
                h = splitmix(h ^ 1);
                for &s in w {
                    h = splitmix(h ^ (s as u64 + 2));
                }
                splitmix(h ^ (w.len() as u64).rotate_left(32))
            }
            Atom::Point(p) => {
                h = splitmix(h ^ 2);
                for c in p {
                    h = splitmix(h ^ *c.numer() as u64);
                    h = splitmix(h ^ (*c.denom() as u64).rotate_left(17));
                }
                h
            }
        }
    }
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Named symbols; symbol ids are positions in this list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::malformed("alphabet", "no symbols"));
        }
        if names.len() > Symbol::MAX as usize {
            return Err(Error::malformed("alphabet", "too many symbols"));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains('.') || n.chars().any(char::is_whitespace) {
                return Err(Error::malformed("alphabet", format!("bad symbol name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::malformed("alphabet", format!("duplicate symbol `{n}`")));
            }
        }
        Ok(Alphabet { names })
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet::new(["0", "1"]).expect("valid alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as Symbol)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, s: Symbol) -> Result<&str> {
        self.names
            .get(s as usize)
            .map(String::as_str)
            .ok_or(Error::SymbolOutOfRange {
                id: s as usize,
                size: self.len(),
            })
    }

    pub fn check(&self, word: &[Symbol]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= self.len()) {
            Some(&s) => Err(Error::SymbolOutOfRange {
                id: s as usize,
                size: self.len(),
            }),
            None => Ok(()),
        }
    }

    /// Parses a dot-separated word; the empty string is ε.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split('.').map(|n| self.symbol(n)).collect()
    }

    pub fn format_word(&self, word: &[Symbol]) -> Result<String> {
        let mut out = String::new();
        for (i, &s) in word.iter().enumerate() {
            if i > 0 {
                out.push('.');
            }
            out.push_str(self.name(s)?);
        }
        Ok(out)
    }

    pub fn same_as(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.names.clone(),
                right: other.names.clone(),
            })
        }
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Alphabet::new(names)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.names
    }
}

/// Renders a rational as a terminating decimal when possible, else as `p/q`.
pub fn format_coord(c: &Coord) -> String {
    let (n, d) = (*c.numer(), *c.denom());
    let mut rest = d;
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{n}/{d}");
    }
    let digits = twos.max(fives);
    let scale = 10i128.pow(digits);
    let scaled = n as i128 * scale / d as i128;
    if digits == 0 {
        return scaled.to_string();
    }
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    let int = abs / scale as u128;
    let frac = abs % scale as u128;
    let frac = format!("{frac:0width$}", width = digits as usize);
    format!("{sign}{int}.{}", frac.trim_end_matches('0'))
}

/// Parses `"0.25"`, `"1"` or `"1/3"` exactly.
pub fn parse_coord(text: &str) -> Result<Coord> {
    let bad = || Error::malformed("coordinate", text);
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(bad());
    }
    let int: i64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let denom = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    let value = Ratio::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// The space atoms are drawn from; owns the textual codec for atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    Words { alphabet: Alphabet },
    Points { dim: usize },
}

impl Universe {
    pub fn words(alphabet: Alphabet) -> Self {
        Universe::Words { alphabet }
    }

    pub fn check(&self, atom: &Atom) -> Result<()> {
        match (self, atom) {
            (Universe::Words { alphabet }, Atom::Word(w)) => alphabet.check(w),
            (Universe::Points { dim }, Atom::Point(p)) => {
                if p.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        actual: p.len(),
                    });
                }
                let (zero, one) = (Coord::from_integer(0), Coord::from_integer(1));
                match p.iter().find(|c| **c < zero || **c > one) {
                    Some(c) => Err(Error::CoordinateRange(format_coord(c))),
                    None => Ok(()),
                }
            }
            (Universe::Words { .. }, _) => Err(Error::WrongAtomKind { expected: "word" }),
            (Universe::Points { .. }, _) => Err(Error::WrongAtomKind { expected: "point" }),
        }
    }

    pub fn encode(&self, atom: &Atom) -> Result<Value> {
        self.check(atom)?;
        Ok(match (self, atom) {
            (Universe::Words { alphabet }, Atom::Word(w)) => Value::String(alphabet.format_word(w)?),
            (_, Atom::Point(p)) => Value::Array(p.iter().map(|c| Value::String(format_coord(c))).collect()),
            _ => unreachable!("checked above"),
        })
    }

    pub fn decode(&self, value: &Value) -> Result<Atom> {
        let atom = match (self, value) {
            (Universe::Words { alphabet }, Value::String(s)) => Atom::Word(alphabet.parse_word(s)?),
            (Universe::Points { .. }, Value::Array(items)) => Atom::Point(
                items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => parse_coord(s),
                        Value::Number(n) => parse_coord(&n.to_string()),
                        other => Err(Error::malformed("coordinate", other)),
                    })
                    .collect::<Result<_>>()?,
            ),
            (_, other) => return Err(Error::malformed("atom", other)),
        };
        self.check(&atom)?;
        Ok(atom)
    }

    /// Human-readable rendering used in logs and DOT output.
    pub fn display(&self, atom: &Atom) -> String {
        match (self, atom) {
            (Universe::Words { .. }, Atom::Word(w)) if w.is_empty() => "ε".to_string(),
            (_, atom) => match self.encode(atom) {
                Ok(Value::String(s)) => s,
                Ok(v) => v.to_string(),
                Err(_) => format!("{atom:?}"),
            },
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn words_round_trip_through_names() {
        let a = Alphabet::new(["Bl", "Br", "R", "Y"]).unwrap();
        let u = Universe::words(a.clone());
        let w = Atom::word(vec![1, 3]);
        assert_eq!(u.encode(&w).unwrap(), Value::String("Br.Y".into()));
        assert_eq!(u.decode(&Value::String("Br.Y".into())).unwrap(), w);
        assert_eq!(u.decode(&Value::String(String::new())).unwrap(), Atom::word(vec![]));
        assert!(matches!(
            u.decode(&Value::String("Br.Q".into())),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn coords_format_exactly() {
        assert_eq!(format_coord(&Ratio::new(1, 4)), "0.25");
        assert_eq!(format_coord(&Ratio::new(1, 1)), "1");
        assert_eq!(format_coord(&Ratio::new(0, 1)), "0");
        assert_eq!(format_coord(&Ratio::new(1, 3)), "1/3");
        assert_eq!(format_coord(&Ratio::new(3, 40)), "0.075");
        assert_eq!(parse_coord("0.075").unwrap(), Ratio::new(3, 40));
        assert_eq!(parse_coord("2/6").unwrap(), Ratio::new(1, 3));
        assert!(parse_coord("1/0").is_err());
        assert!(parse_coord("x").is_err());
    }

    #[test]
    fn points_outside_unit_cube_are_rejected() {
        let u = Universe::Points { dim: 2 };
        let ok = Atom::Point(vec![Ratio::new(1, 2), Ratio::new(1, 1)]);
        assert!(u.check(&ok).is_ok());
        let bad = Atom::Point(vec![Ratio::new(3, 2), Ratio::new(0, 1)]);
        assert!(matches!(u.check(&bad), Err(Error::CoordinateRange(_))));
        let short = Atom::Point(vec![Ratio::new(1, 2)]);
        assert!(matches!(u.check(&short), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn alphabet_rejects_dots_and_duplicates() {
        assert!(Alphabet::new(["a.b"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    proptest! {
        #[test]
        fn coord_codec_round_trips(n in 0i64..=1000, d in 1i64..=1000) {
            let c = Ratio::new(n, d);
            prop_assert_eq!(parse_coord(&format_coord(&c)).unwrap(), c);
        }

        #[test]
        fn word_codec_round_trips(w in proptest::collection::vec(0u16..3, 0..12)) {
            let u = Universe::words(Alphabet::new(["a", "b", "c"]).unwrap());
            let atom = Atom::Word(w);
            prop_assert_eq!(u.decode(&u.encode(&atom).unwrap()).unwrap(), atom);
        }
    }
}

//! The knowledge base: every oracle answer received so far.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::atom::{Atom, Universe};
use crate::error::{Error, Result};
use crate::label::{MemLabel, PrefLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntryId(pub u32);

/// A single recorded fact. Preferences are stored normalized: never `Greater`,
/// and symmetric labels keep their operands in atom order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fact {
    Mem { atom: Atom, label: MemLabel },
    Pref { lhs: Atom, rhs: Atom, label: PrefLabel },
}

impl Fact {
    pub fn mem(atom: Atom, label: MemLabel) -> Self {
        Fact::Mem { atom, label }
    }

    pub fn pref(lhs: Atom, rhs: Atom, label: PrefLabel) -> Self {
        match label {
            PrefLabel::Greater => Fact::Pref {
                lhs: rhs,
                rhs: lhs,
                label: PrefLabel::Less,
            },
            PrefLabel::Equiv | PrefLabel::Incomparable if rhs < lhs => Fact::Pref {
                lhs: rhs,
                rhs: lhs,
                label,
            },
            label => Fact::Pref { lhs, rhs, label },
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        let (a, b) = match self {
            Fact::Mem { atom, .. } => (atom, None),
            Fact::Pref { lhs, rhs, .. } => (lhs, Some(rhs)),
        };
        std::iter::once(a).chain(b)
    }

    /// The label this fact gives to `C(x, y)`, if it concerns that pair.
    pub fn pref_for(&self, x: &Atom, y: &Atom) -> Option<PrefLabel> {
        match self {
            Fact::Pref { lhs, rhs, label } if lhs == x && rhs == y => Some(*label),
            Fact::Pref { lhs, rhs, label } if lhs == y && rhs == x => Some(label.reversed()),
            _ => None,
        }
    }
}

/// Where an entry came from. Only `Query` entries are candidates for dropping
/// during recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Query,
    Counterexample,
    Prior,
}

impl Source {
    pub fn trusted(self) -> bool {
        !matches!(self, Source::Query)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub id: EntryId,
    pub fact: Fact,
    pub source: Source,
    pub active: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    entries: Vec<Entry>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a fact; an identical active fact is returned instead of duplicated.
    pub fn add(&mut self, fact: Fact, source: Source) -> EntryId {
        if let Some(e) = self.entries.iter().find(|e| e.active && e.fact == fact) {
            return e.id;
        }
        let id = EntryId(self.entries.len() as u32);
        self.entries.push(Entry {
            id,
            fact,
            source,
            active: true,
        });
        id
    }

    pub fn add_membership(&mut self, atom: Atom, label: MemLabel) -> EntryId {
        self.add(Fact::mem(atom, label), Source::Query)
    }

    pub fn add_preference(&mut self, x: Atom, y: Atom, label: PrefLabel) -> EntryId {
        self.add(Fact::pref(x, y, label), Source::Query)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries ever added, in acquisition order.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn active(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.active)
    }

    pub fn get(&self, id: EntryId) -> Option<&Entry> {
        self.entries.get(id.0 as usize)
    }

    pub fn set_active(&mut self, id: EntryId, active: bool) -> Result<()> {
        let e = self
            .entries
            .get_mut(id.0 as usize)
            .ok_or_else(|| Error::malformed("entry id", id.0))?;
        e.active = active;
        Ok(())
    }

    /// A copy holding only the given active entries, with ids preserved.
    pub fn restricted_to(&self, keep: &BTreeSet<EntryId>) -> KnowledgeBase {
        let mut kb = self.clone();
        for e in &mut kb.entries {
            e.active = e.active && keep.contains(&e.id);
        }
        kb
    }

    /// A copy where each active entry's fact is replaced by `f`, or
    /// deactivated when `f` returns `None`. Ids are preserved.
    pub fn map_facts(&self, f: impl Fn(&Entry) -> Option<Fact>) -> KnowledgeBase {
        let mut kb = self.clone();
        for e in kb.entries.iter_mut().filter(|e| e.active) {
            match f(e) {
                Some(fact) => e.fact = fact,
                None => e.active = false,
            }
        }
        kb
    }

    /// Active membership labels of `atom`, possibly conflicting.
    pub fn memberships<'a>(&'a self, atom: &'a Atom) -> impl Iterator<Item = (EntryId, MemLabel)> + 'a {
        self.active().filter_map(move |e| match &e.fact {
            Fact::Mem { atom: a, label } if a == atom => Some((e.id, *label)),
            _ => None,
        })
    }

    pub fn membership(&self, atom: &Atom) -> Option<MemLabel> {
        self.memberships(atom).next().map(|(_, l)| l)
    }

    pub fn has_preference(&self, x: &Atom, y: &Atom) -> bool {
        self.active().any(|e| e.fact.pref_for(x, y).is_some())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.active().flat_map(|e| e.fact.atoms().cloned()).collect()
    }

    pub fn counts(&self) -> (usize, usize) {
        self.active().fold((0, 0), |(m, p), e| match e.fact {
            Fact::Mem { .. } => (m + 1, p),
            Fact::Pref { .. } => (m, p + 1),
        })
    }

    /// `{mem: [[atom, "in"|"out"], ...], pref: [[x, y, "<"|">"|"="|"||"], ...]}`
    /// over active entries.
    pub fn to_json(&self, universe: &Universe) -> Result<Value> {
        let mut mem = Vec::new();
        let mut pref = Vec::new();
        for e in self.active() {
            match &e.fact {
                Fact::Mem { atom, label } => mem.push(json!([universe.encode(atom)?, label.token()])),
                Fact::Pref { lhs, rhs, label } => {
                    pref.push(json!([universe.encode(lhs)?, universe.encode(rhs)?, label.token()]))
                }
            }
        }
        Ok(json!({ "mem": mem, "pref": pref }))
    }

    pub fn from_json(universe: &Universe, value: &Value) -> Result<KnowledgeBase> {
        let mut kb = KnowledgeBase::new();
        let list = |key: &str| -> Result<Vec<Value>> {
            match value.get(key) {
                None | Some(Value::Null) => Ok(Vec::new()),
                Some(Value::Array(items)) => Ok(items.clone()),
                Some(other) => Err(Error::malformed("knowledge base", format!("`{key}` is {other}"))),
            }
        };
        for item in list("mem")? {
            match item.as_array().map(Vec::as_slice) {
                Some([atom, Value::String(l)]) => {
                    kb.add(Fact::mem(universe.decode(atom)?, l.parse()?), Source::Query);
                }
                _ => return Err(Error::malformed("membership entry", item)),
            }
        }
        for item in list("pref")? {
            match item.as_array().map(Vec::as_slice) {
                Some([x, y, Value::String(l)]) => {
                    kb.add(
                        Fact::pref(universe.decode(x)?, universe.decode(y)?, l.parse()?),
                        Source::Query,
                    );
                }
                _ => return Err(Error::malformed("preference entry", item)),
            }
        }
        Ok(kb)
    }
}

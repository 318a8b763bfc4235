//! Consistency of concepts with a knowledge base.

use std::collections::BTreeSet;

use crate::atom::Atom;
use crate::knowledge::{Fact, KnowledgeBase};
use crate::label::PrefLabel;

/// A subset of the universe, given by its characteristic function.
pub trait Concept {
    fn contains(&self, atom: &Atom) -> bool;
}

impl<C: Concept + ?Sized> Concept for &C {
    fn contains(&self, atom: &Atom) -> bool {
        (**self).contains(atom)
    }
}

impl<C: Concept + ?Sized> Concept for Box<C> {
    fn contains(&self, atom: &Atom) -> bool {
        (**self).contains(atom)
    }
}

impl<C: Concept + ?Sized> Concept for std::sync::Arc<C> {
    fn contains(&self, atom: &Atom) -> bool {
        (**self).contains(atom)
    }
}

/// A finite set of atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet(pub BTreeSet<Atom>);

impl Concept for AtomSet {
    fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().collect())
    }
}

/// A concept given by a closure.
pub struct FnConcept<F>(pub F);

impl<F: Fn(&Atom) -> bool> Concept for FnConcept<F> {
    fn contains(&self, atom: &Atom) -> bool {
        (self.0)(atom)
    }
}

pub fn fact_holds<C: Concept + ?Sized>(concept: &C, fact: &Fact) -> bool {
    match fact {
        Fact::Mem { atom, label } => concept.contains(atom) == label.is_member(),
        Fact::Pref { lhs, rhs, label } => {
            *label == PrefLabel::Incomparable || label.admits(concept.contains(lhs), concept.contains(rhs))
        }
    }
}

/// MemReP over a list of preference facts: `x ⪯ y` implies `φ(x) ≤ φ(y)`.
pub fn memrep_holds<'a, C: Concept + ?Sized>(
    concept: &C,
    prefs: impl IntoIterator<Item = (&'a Atom, &'a Atom, PrefLabel)>,
) -> bool {
    prefs
        .into_iter()
        .all(|(x, y, l)| l.admits(concept.contains(x), concept.contains(y)))
}

/// Every active entry holds under `concept`.
pub fn is_consistent<C: Concept + ?Sized>(concept: &C, kb: &KnowledgeBase) -> bool {
    kb.active().all(|e| fact_holds(concept, &e.fact))
}

/// The concepts of `class` consistent with `kb`, in their original order.
pub fn consistent_filter<'a, C: Concept>(class: &'a [C], kb: &KnowledgeBase) -> Vec<&'a C> {
    class.iter().filter(|c| is_consistent(*c, kb)).collect()
}

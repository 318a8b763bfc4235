use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::atom::Atom;
use crate::consistency::Concept;
use crate::knowledge::KnowledgeBase;
use crate::label::{MemLabel, PrefLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Mem(MemLabel),
    Pref(PrefLabel),
}

impl Outcome {
    pub fn admits<C: Concept + ?Sized>(&self, c: &C, x: &Atom, y: Option<&Atom>) -> bool {
        match (self, y) {
            (Outcome::Mem(l), _) => c.contains(x) == l.is_member(),
            (Outcome::Pref(l), Some(y)) => l.admits(c.contains(x), c.contains(y)),
            (Outcome::Pref(_), None) => true,
        }
    }
}

/// Surviving concept counts for each answer an arm may receive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmEstimate {
    /// Size of the concept pool the counts refer to.
    pub pool: usize,
    /// `(answer, survivors in Ψ, survivors in the pool)`.
    pub outcomes: Vec<(Outcome, usize, usize)>,
}

impl ArmEstimate {
    fn counted(&self) -> impl Iterator<Item = &(Outcome, usize, usize)> {
        self.outcomes
            .iter()
            .filter(|(o, _, _)| *o != Outcome::Pref(PrefLabel::Incomparable))
    }

    pub fn worst_psi(&self) -> usize {
        self.counted().map(|o| o.1).max().unwrap_or(0)
    }

    pub fn worst_pool(&self) -> usize {
        self.counted().map(|o| o.2).max().unwrap_or(0)
    }

    pub fn survivors(&self, outcome: Outcome) -> usize {
        self.outcomes.iter().find(|o| o.0 == outcome).map_or(self.pool, |o| o.2)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Candidates {
    pub x: Vec<Atom>,
    pub mem: Option<(Atom, ArmEstimate)>,
    pub pref: Option<((Atom, Atom), ArmEstimate)>,
}

fn estimate<C: Concept>(psi: &[C], pool: &[C], outcomes: &[Outcome], x: &Atom, y: Option<&Atom>) -> ArmEstimate {
    let count = |set: &[C], o: &Outcome| set.iter().filter(|c| o.admits(*c, x, y)).count();
    ArmEstimate {
        pool: pool.len(),
        outcomes: outcomes.iter().map(|o| (*o, count(psi, o), count(pool, o))).collect(),
    }
}

const MEM_OUTCOMES: [Outcome; 2] = [Outcome::Mem(MemLabel::Member), Outcome::Mem(MemLabel::NonMember)];

const PREF_OUTCOMES: [Outcome; 4] = [
    Outcome::Pref(PrefLabel::Less),
    Outcome::Pref(PrefLabel::Greater),
    Outcome::Pref(PrefLabel::Equiv),
    Outcome::Pref(PrefLabel::Incomparable),
];

/// Picks the membership atom and the preference pair from `x` with the
/// fewest worst-case survivors in `psi`, then in `pool`, then by atom order.
/// Atoms already labeled and pairs already compared are skipped, as are
/// those `blocked` rejects.
pub fn select_arms<C: Concept>(
    psi: &[C],
    pool: &[C],
    x: Vec<Atom>,
    kb: &KnowledgeBase,
    blocked_atom: &dyn Fn(&Atom) -> bool,
    blocked_pair: &dyn Fn(&Atom, &Atom) -> bool,
) -> Candidates {
    let x: Vec<Atom> = x.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mem = x
        .iter()
        .filter(|a| kb.membership(a).is_none() && !blocked_atom(a))
        .map(|a| (a.clone(), estimate(psi, pool, &MEM_OUTCOMES, a, None)))
        .min_by(|(a, ea), (b, eb)| (ea.worst_psi(), ea.worst_pool(), a).cmp(&(eb.worst_psi(), eb.worst_pool(), b)));
    let mut pref: Option<((Atom, Atom), ArmEstimate)> = None;
    for (i, y) in x.iter().enumerate() {
        for z in &x[i + 1..] {
            if kb.has_preference(y, z) || blocked_pair(y, z) {
                continue;
            }
            let e = estimate(psi, pool, &PREF_OUTCOMES, y, Some(z));
            let better = match &pref {
                None => true,
                Some((p, best)) => {
                    (e.worst_psi(), e.worst_pool(), (y, z)) < (best.worst_psi(), best.worst_pool(), (&p.0, &p.1))
                }
            };
            if better {
                pref = Some(((y.clone(), z.clone()), e));
            }
        }
    }
    Candidates { x, mem, pref }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::FnConcept;
    use crate::monotone::{Grid, GridConcept};
    use num_rational::Ratio;

    #[test]
    fn top_and_bottom_are_split_by_any_word() {
        let psi: Vec<Box<dyn Concept>> = vec![
            Box::new(FnConcept(|_: &Atom| true)),
            Box::new(FnConcept(|_: &Atom| false)),
        ];
        let x = vec![Atom::word(vec![]), Atom::word(vec![0])];
        let c = select_arms(&psi, &psi, x, &KnowledgeBase::new(), &|_| false, &|_, _| false);
        let (atom, est) = c.mem.unwrap();
        assert_eq!(atom, Atom::word(vec![]));
        assert_eq!(est.worst_psi(), 1);
        // ε and 0 agree under both concepts, so every comparison answer is
        // equally uninformative.
        let (_, pe) = c.pref.unwrap();
        assert_eq!(pe.worst_psi(), 2);
    }

    #[test]
    fn grid_split_is_decisive() {
        let g = Grid::new(1, 3).unwrap();
        let psi = vec![
            GridConcept::new(vec![Ratio::from_integer(0)]),
            GridConcept::new(vec![Ratio::from_integer(1)]),
        ];
        let pool: Vec<GridConcept> = g.concepts().collect();
        let zero = Atom::Point(vec![Ratio::from_integer(0)]);
        let c = select_arms(
            &psi,
            &pool,
            vec![zero.clone()],
            &KnowledgeBase::new(),
            &|_| false,
            &|_, _| false,
        );
        let (atom, est) = c.mem.unwrap();
        assert_eq!(atom, zero);
        assert_eq!(est.worst_psi(), 1);
        assert_eq!(est.survivors(Outcome::Mem(MemLabel::Member)), 1);
        assert_eq!(est.survivors(Outcome::Mem(MemLabel::NonMember)), 2);
    }

    #[test]
    fn labeled_atoms_and_known_pairs_are_skipped() {
        let a = Atom::word(vec![0]);
        let b = Atom::word(vec![1]);
        let mut kb = KnowledgeBase::new();
        kb.add_membership(a.clone(), MemLabel::Member);
        kb.add_preference(b.clone(), a.clone(), PrefLabel::Less);
        let psi = vec![FnConcept(|_: &Atom| true)];
        let c = select_arms(&psi, &psi, vec![a, b.clone()], &kb, &|_| false, &|_, _| false);
        assert_eq!(c.mem.unwrap().0, b);
        assert!(c.pref.is_none());
    }
}

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{CostFn, PreferenceOrder, SharedConcept};
use crate::atom::{splitmix, Atom, Symbol};
use crate::dfa::{Dfa, State};
use crate::error::{Error, Result};
use crate::label::PrefLabel;

fn label_of(ord: Ordering) -> PrefLabel {
    match ord {
        Ordering::Less => PrefLabel::Less,
        Ordering::Greater => PrefLabel::Greater,
        Ordering::Equal => PrefLabel::Equiv,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomOrderParams {
    /// Probability that a pair across the membership boundary is incomparable.
    pub frac_incomparable: f64,
    /// Fraction of same-membership pairs that are strictly ordered; defaults
    /// to `1 − frac_incomparable`.
    pub frac_strict_unforced: Option<f64>,
    /// Fraction of comparable same-membership pairs that are equivalent.
    pub equiv_frac: f64,
}

impl Default for RandomOrderParams {
    fn default() -> Self {
        RandomOrderParams {
            frac_incomparable: 0.1,
            frac_strict_unforced: None,
            equiv_frac: 0.1,
        }
    }
}

impl RandomOrderParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::parameter(name, v, "[0, 1]"))
            }
        };
        unit("frac_incomparable", self.frac_incomparable)?;
        unit("equiv_frac", self.equiv_frac)?;
        if let Some(f) = self.frac_strict_unforced {
            unit("frac_strict_unforced", f)?;
            if f > 1.0 - self.equiv_frac + 1e-12 {
                return Err(Error::parameter("frac_strict_unforced", f, "[0, 1 − equiv_frac]"));
            }
        }
        Ok(())
    }

    fn within_block_comparable(&self) -> f64 {
        match self.frac_strict_unforced {
            Some(f) if self.equiv_frac < 1.0 => (f / (1.0 - self.equiv_frac)).min(1.0),
            Some(_) => 1.0,
            None => 1.0 - self.frac_incomparable,
        }
    }
}

/// A random preorder satisfying MemReP, fixed up front as a dominance order.
///
/// Atoms fall into equivalence classes per membership block (a seeded hash
/// picks the class). Each class gets a key vector; `x ⪯ y` iff every key of
/// `x` is at most the matching key of `y`. The first key puts members above
/// non-members. The other keys mix the first key with independent noise; the
/// mixing weight is tuned so that the requested fraction of same-block pairs
/// is comparable, and a member-side offset so that the requested fraction of
/// cross-block pairs is incomparable. Answers are read off this fixed
/// structure, so they are transitive and repeatable.
pub struct RandomMemRepOrder {
    target: SharedConcept,
    seed: u64,
    /// Classes per block; 0 means every atom is its own class.
    classes: u64,
    dims: usize,
    mix: f64,
    offset: f64,
}

/// Classes used to tune the structure when classes are unbounded.
const CALIBRATION_CLASSES: u64 = 64;

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

impl RandomMemRepOrder {
    pub fn new(target: SharedConcept, params: RandomOrderParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let classes = if params.equiv_frac > 0.0 {
            (1.0 / params.equiv_frac).round().max(1.0) as u64
        } else {
            0
        };
        let p_within = params.within_block_comparable();
        // With `d` keys of independent noise, a pair is comparable with
        // probability 2^(1 − d); enough keys are needed to get below target.
        let mut dims = 2;
        while dims < 10 && 2f64.powi(1 - dims as i32) > p_within {
            dims += 1;
        }
        let mut order = RandomMemRepOrder {
            target,
            seed,
            classes,
            dims,
            mix: 0.0,
            offset: 0.0,
        };
        let sample = if classes == 0 { CALIBRATION_CLASSES } else { classes };
        let keys =
            |o: &RandomMemRepOrder, block: bool| -> Vec<Vec<f64>> { (0..sample).map(|c| o.keys(block, c)).collect() };
        let within = |o: &RandomMemRepOrder| -> f64 {
            let mut comparable = 0usize;
            let mut total = 0usize;
            for block in [false, true] {
                let k = keys(o, block);
                for i in 0..k.len() {
                    for j in i + 1..k.len() {
                        total += 1;
                        comparable += usize::from(dominates(&k[i], &k[j]) || dominates(&k[j], &k[i]));
                    }
                }
            }
            comparable as f64 / total.max(1) as f64
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..40 {
            order.mix = (lo + hi) / 2.0;
            if within(&order) < p_within {
                lo = order.mix;
            } else {
                hi = order.mix;
            }
        }
        order.mix = hi;
        let across = |o: &RandomMemRepOrder| -> f64 {
            let (n, m) = (keys(o, false), keys(o, true));
            let incomparable = n
                .iter()
                .flat_map(|a| m.iter().map(move |b| !dominates(a, b)))
                .filter(|&x| x)
                .count();
            incomparable as f64 / (n.len() * m.len()) as f64
        };
        let (mut lo, mut hi) = (-2.0, 2.0);
        for _ in 0..40 {
            order.offset = (lo + hi) / 2.0;
            if across(&order) > params.frac_incomparable {
                lo = order.offset;
            } else {
                hi = order.offset;
            }
        }
        order.offset = hi;
        Ok(order)
    }

    fn class_of(&self, atom: &Atom) -> (bool, u64) {
        let h = atom.fingerprint(self.seed);
        let class = if self.classes == 0 { h } else { h % self.classes };
        (self.target.contains(atom), class)
    }

    fn keys(&self, member: bool, class: u64) -> Vec<f64> {
        let base = splitmix(self.seed ^ splitmix(class ^ u64::from(member) << 63));
        let u = unit(base);
        let block = if member { 1.0 } else { 0.0 };
        let mut keys = Vec::with_capacity(self.dims);
        keys.push(2.0 * block + u);
        for d in 1..self.dims {
            let v = unit(splitmix(base ^ d as u64));
            keys.push(self.mix * u + (1.0 - self.mix) * v + self.offset * block);
        }
        keys
    }
}

fn dominates(low: &[f64], high: &[f64]) -> bool {
    low.iter().zip(high).all(|(a, b)| a <= b)
}

impl PreferenceOrder for RandomMemRepOrder {
    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel {
        let (cx, cy) = (self.class_of(x), self.class_of(y));
        if cx == cy {
            return PrefLabel::Equiv;
        }
        let (kx, ky) = (self.keys(cx.0, cx.1), self.keys(cy.0, cy.1));
        match (dominates(&kx, &ky), dominates(&ky, &kx)) {
            (true, true) => PrefLabel::Equiv,
            (true, false) => PrefLabel::Less,
            (false, true) => PrefLabel::Greater,
            (false, false) => PrefLabel::Incomparable,
        }
    }
}

/// A total preorder built from the structure of a target automaton.
///
/// Members outrank non-members. A non-member is better the further it is
/// from the dead states, then the longer its longest accepted prefix. A
/// member is better the more of its two-symbol extensions stay accepted.
pub struct TomitaSemanticOrder {
    dfa: Dfa,
    /// Shortest distance to a dead state; `u64::MAX` when none is reachable.
    to_dead: Vec<u64>,
}

impl TomitaSemanticOrder {
    pub fn new(target: &Dfa) -> Self {
        let dfa = target.minimize();
        let n = dfa.num_states();
        let k = dfa.alphabet().len() as Symbol;
        // Dead states: no accepting state reachable.
        let mut live = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n as State {
                if !live[q as usize] && (dfa.is_accepting(q) || (0..k).any(|a| live[dfa.step(q, a) as usize])) {
                    live[q as usize] = true;
                    changed = true;
                }
            }
        }
        let mut to_dead = vec![u64::MAX; n];
        for q in 0..n {
            if !live[q] {
                to_dead[q] = 0;
            }
        }
        for _ in 0..n {
            for q in 0..n as State {
                let best = (0..k)
                    .map(|a| to_dead[dfa.step(q, a) as usize])
                    .min()
                    .unwrap_or(u64::MAX)
                    .saturating_add(1);
                if best < to_dead[q as usize] {
                    to_dead[q as usize] = best;
                }
            }
        }
        TomitaSemanticOrder { dfa, to_dead }
    }

    fn key(&self, atom: &Atom) -> (bool, u64, u64) {
        let Atom::Word(w) = atom else { return (false, 0, 0) };
        let mut q = self.dfa.initial();
        // One more than the longest accepted prefix, 0 when there is none.
        let mut longest_prefix = u64::from(self.dfa.is_accepting(q));
        let mut prefix_len = 0u64;
        for &a in w {
            q = self.dfa.step(q, a);
            prefix_len += 1;
            if self.dfa.is_accepting(q) {
                longest_prefix = prefix_len + 1;
            }
        }
        if self.dfa.is_accepting(q) {
            let k = self.dfa.alphabet().len() as Symbol;
            let kept = (0..k)
                .flat_map(|a| (0..k).map(move |b| (a, b)))
                .filter(|&(a, b)| self.dfa.is_accepting(self.dfa.step(self.dfa.step(q, a), b)))
                .count() as u64;
            (true, kept, 0)
        } else {
            (false, self.to_dead[q as usize], longest_prefix)
        }
    }
}

impl PreferenceOrder for TomitaSemanticOrder {
    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel {
        label_of(self.key(x).cmp(&self.key(y)))
    }
}

pub fn tomita_order(target: &Dfa) -> TomitaSemanticOrder {
    TomitaSemanticOrder::new(target)
}

/// Cheaper atoms are preferred; equal costs are equivalent.
pub struct CostOrder {
    cost: CostFn,
}

impl CostOrder {
    pub fn new(cost: CostFn) -> Self {
        CostOrder { cost }
    }
}

impl PreferenceOrder for CostOrder {
    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel {
        let (cx, cy) = ((self.cost)(x), (self.cost)(y));
        if (cx - cy).abs() <= 1e-12 * cx.abs().max(cy.abs()).max(1.0) {
            PrefLabel::Equiv
        } else if cx > cy {
            PrefLabel::Less
        } else {
            PrefLabel::Greater
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::AtomSet;
    use crate::targets::tomita;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn w(s: &[u16]) -> Atom {
        Atom::word(s.to_vec())
    }

    fn random_word(rng: &mut ChaCha8Rng) -> Atom {
        let len = rng.gen_range(0..8);
        Atom::word((0..len).map(|_| rng.gen_range(0..2)).collect::<Vec<u16>>())
    }

    #[test]
    fn total_when_nothing_is_incomparable() {
        let atoms: Vec<Atom> = (0..6).map(|i| w(&[i])).collect();
        let target: AtomSet = atoms[..3].iter().cloned().collect();
        let params = RandomOrderParams {
            frac_incomparable: 0.0,
            ..Default::default()
        };
        let mut order = RandomMemRepOrder::new(Arc::new(target), params, 4).unwrap();
        for (i, x) in atoms.iter().enumerate() {
            for (j, y) in atoms.iter().enumerate() {
                let l = order.compare(x, y);
                assert_ne!(l, PrefLabel::Incomparable);
                if i < 3 && j >= 3 {
                    assert_eq!(l, PrefLabel::Greater);
                }
            }
        }
    }

    #[test]
    fn incomparable_fraction_tracks_parameter() {
        let target = Arc::new(tomita(4).unwrap());
        let mut order = RandomMemRepOrder::new(target, RandomOrderParams::default(), 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut incomparable = 0;
        let mut asked = 0;
        while asked < 1000 {
            let (x, y) = (random_word(&mut rng), random_word(&mut rng));
            if x == y {
                continue;
            }
            asked += 1;
            if order.compare(&x, &y) == PrefLabel::Incomparable {
                incomparable += 1;
            }
        }
        let frac = incomparable as f64 / 1000.0;
        assert!((0.05..=0.15).contains(&frac), "{frac}");
    }

    #[test]
    fn answers_are_memoized_and_antisymmetric() {
        let target = Arc::new(tomita(6).unwrap());
        let mut order = RandomMemRepOrder::new(target, RandomOrderParams::default(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let (x, y) = (random_word(&mut rng), random_word(&mut rng));
            let l = order.compare(&x, &y);
            assert_eq!(order.compare(&x, &y), l);
            assert_eq!(order.compare(&y, &x), l.reversed());
        }
    }

    #[test]
    fn semantic_order_prefers_members_and_is_total() {
        let t = tomita(4).unwrap();
        let mut order = tomita_order(&t);
        // 1 is accepted; 000 is dead.
        assert_eq!(order.compare(&w(&[0, 0, 0]), &w(&[1])), PrefLabel::Less);
        let mut order2 = tomita_order(&tomita(2).unwrap());
        // 1 can still be completed, 11 cannot.
        assert_eq!(order2.compare(&w(&[1, 1]), &w(&[1])), PrefLabel::Less);
        // Both dead; 100 has the longer accepted prefix.
        assert_eq!(order2.compare(&w(&[1, 0, 0]), &w(&[0])), PrefLabel::Greater);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (x, y) = (random_word(&mut rng), random_word(&mut rng));
            assert_ne!(order.compare(&x, &y), PrefLabel::Incomparable);
        }
    }

    #[test]
    fn cost_order_reverses_costs() {
        let cost: CostFn = Arc::new(|a: &Atom| a.as_word().map(|w| w.len() as f64).unwrap_or(0.0));
        let mut o = CostOrder::new(cost);
        assert_eq!(o.compare(&w(&[0, 0]), &w(&[1])), PrefLabel::Less);
        assert_eq!(o.compare(&w(&[0]), &w(&[1])), PrefLabel::Equiv);
    }
}

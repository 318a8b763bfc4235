use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Teacher;
use crate::atom::Atom;
use crate::label::{MemLabel, PrefLabel};

/// Wraps a teacher so that each membership answer is flipped with
/// probability `rate` and each comparison answer is replaced, with the same
/// probability, by a uniformly random different label. Answers are memoized
/// per query, so repeating a query repeats its answer. Equivalence answers
/// pass through unchanged.
pub struct Noisy<T> {
    inner: T,
    rate: f64,
    rng: ChaCha8Rng,
    mem: HashMap<Atom, MemLabel>,
    pref: HashMap<(Atom, Atom), PrefLabel>,
}

pub fn with_noise<T>(teacher: T, rate: f64, seed: u64) -> Noisy<T> {
    Noisy {
        inner: teacher,
        rate: rate.clamp(0.0, 1.0),
        rng: ChaCha8Rng::seed_from_u64(seed),
        mem: HashMap::new(),
        pref: HashMap::new(),
    }
}

impl<T> Noisy<T> {
    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<H, T: Teacher<H>> Teacher<H> for Noisy<T> {
    fn membership(&mut self, atom: &Atom) -> MemLabel {
        if let Some(&l) = self.mem.get(atom) {
            return l;
        }
        let truth = self.inner.membership(atom);
        let l = if self.rng.gen::<f64>() < self.rate {
            truth.flipped()
        } else {
            truth
        };
        self.mem.insert(atom.clone(), l);
        l
    }

    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel {
        let swapped = y < x;
        let key = if swapped {
            (y.clone(), x.clone())
        } else {
            (x.clone(), y.clone())
        };
        let l = match self.pref.get(&key) {
            Some(&l) => l,
            None => {
                let truth = self.inner.compare(&key.0, &key.1);
                let l = if self.rng.gen::<f64>() < self.rate {
                    let others: Vec<PrefLabel> = PrefLabel::ALL.into_iter().filter(|&o| o != truth).collect();
                    others[self.rng.gen_range(0..others.len())]
                } else {
                    truth
                };
                self.pref.insert(key, l);
                l
            }
        };
        if swapped {
            l.reversed()
        } else {
            l
        }
    }

    fn equivalence(&mut self, hypothesis: &H) -> Option<(Atom, MemLabel)> {
        self.inner.equivalence(hypothesis)
    }
}

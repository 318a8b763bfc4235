use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EquivalenceOracle;
use crate::atom::Atom;
use crate::dfa::{Dfa, WordCounter};
use crate::error::Result;
use crate::label::MemLabel;

/// A counterexample drawn uniformly among the disagreeing words whose length
/// lies within `slack` of the shortest disagreement.
pub fn dfa_equivalence<R: Rng + ?Sized>(
    target: &Dfa,
    hypothesis: &Dfa,
    slack: usize,
    rng: &mut R,
) -> Result<Option<(Atom, MemLabel)>> {
    let diff = target.symmetric_difference(hypothesis)?;
    let Some(shortest) = diff.min_accepted_length() else {
        return Ok(None);
    };
    let counter = WordCounter::new(&diff, shortest + slack);
    let weights: Vec<f64> = (shortest..=shortest + slack)
        .map(|l| counter.from(diff.initial(), l) as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut len = shortest;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            len = shortest + i;
            break;
        }
        pick -= w;
    }
    let word = counter
        .sample(&diff, len, rng)
        .or_else(|| counter.sample(&diff, shortest, rng))
        .expect("the shortest length has a disagreeing word");
    let label = MemLabel::from_bool(target.accepts_word(&word));
    Ok(Some((Atom::Word(word), label)))
}

pub struct DfaEquivalence {
    target: Dfa,
    slack: usize,
    rng: ChaCha8Rng,
}

impl DfaEquivalence {
    pub const DEFAULT_SLACK: usize = 4;

    pub fn new(target: Dfa, slack: usize, seed: u64) -> Self {
        DfaEquivalence {
            target,
            slack,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl EquivalenceOracle<Dfa> for DfaEquivalence {
    fn counterexample(&mut self, hypothesis: &Dfa) -> Option<(Atom, MemLabel)> {
        dfa_equivalence(&self.target, hypothesis, self.slack, &mut self.rng)
            .expect("hypothesis shares the target alphabet")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::tomita;

    #[test]
    fn equal_languages_have_no_counterexample() {
        let t = tomita(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(dfa_equivalence(&t, &t.minimize(), 4, &mut rng).unwrap().is_none());
    }

    #[test]
    fn counterexamples_disagree_and_carry_true_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in 1..=7 {
            for b in 1..=7 {
                if a == b {
                    continue;
                }
                let (t, h) = (tomita(a).unwrap(), tomita(b).unwrap());
                let shortest = t.symmetric_difference(&h).unwrap().min_accepted_length().unwrap();
                for _ in 0..5 {
                    let (w, label) = dfa_equivalence(&t, &h, 4, &mut rng).unwrap().unwrap();
                    let w = w.as_word().unwrap().to_vec();
                    assert_ne!(t.accepts_word(&w), h.accepts_word(&w));
                    assert_eq!(label.is_member(), t.accepts_word(&w));
                    assert!(w.len() >= shortest && w.len() <= shortest + 4);
                }
            }
        }
    }
}

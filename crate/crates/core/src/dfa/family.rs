use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Dfa, Synthesizer, WordCounter};
use crate::atom::{Alphabet, Atom, Symbol, Universe};
use crate::error::{Error, Result};
use crate::family::{Family, Survey, SurveyParams};
use crate::knowledge::{EntryId, KnowledgeBase};

/// Longest detour beyond the shortest disagreement when looking for
/// unlabeled distinguishing words.
const LENGTH_SLACK: usize = 8;

/// Regular languages by number of DFA states.
#[derive(Clone, Debug)]
pub struct DfaFamily {
    pub synth: Synthesizer,
    pub max_states: usize,
}

impl DfaFamily {
    pub const DEFAULT_MAX_STATES: usize = 10;

    pub fn new(alphabet: Alphabet) -> Self {
        DfaFamily {
            synth: Synthesizer::new(alphabet),
            max_states: Self::DEFAULT_MAX_STATES,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.synth.alphabet
    }

    fn words_in(&self, diff: &Dfa, n: usize, skip: &dyn Fn(&Atom) -> bool, rng: &mut ChaCha8Rng) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        let Some(shortest) = diff.min_accepted_length() else {
            return out;
        };
        let counter = WordCounter::new(diff, shortest + LENGTH_SLACK);
        for len in shortest..=shortest + LENGTH_SLACK {
            let count = counter.from(diff.initial(), len);
            if count == 0 {
                continue;
            }
            let tries = count.min(64) as usize * 2;
            for _ in 0..tries {
                let w = Atom::Word(counter.sample(diff, len, rng).expect("count is positive"));
                if !skip(&w) && !out.contains(&w) {
                    out.push(w);
                    if out.len() == n {
                        return out;
                    }
                }
            }
            if !out.is_empty() {
                break;
            }
        }
        out
    }
}

impl Family for DfaFamily {
    type Concept = Dfa;

    fn universe(&self) -> Universe {
        Universe::words(self.alphabet().clone())
    }

    fn initial_size(&self) -> usize {
        1
    }

    fn next_size(&self, size: usize) -> Option<usize> {
        (size < self.max_states).then_some(size + 1)
    }

    fn survey(
        &self,
        kb: &KnowledgeBase,
        size: usize,
        params: SurveyParams,
        rng: &mut ChaCha8Rng,
    ) -> Result<Survey<Dfa>> {
        let e = self
            .synth
            .enumerate(kb, size, params.alpha + params.mc_samples, rng.gen())?;
        Ok(Survey {
            psi: e.dfas.iter().take(params.alpha).cloned().collect(),
            pool: e.dfas,
            exact: e.exhausted,
        })
    }

    fn distinguishing_atoms(
        &self,
        a: &Dfa,
        b: &Dfa,
        _size: usize,
        _pool: &[Dfa],
        per_side: usize,
        skip: &dyn Fn(&Atom) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Atom>> {
        let mut out = self.words_in(&a.product(b, |x, y| x && !y)?, per_side, skip, rng);
        out.extend(self.words_in(&b.product(a, |x, y| x && !y)?, per_side, skip, rng));
        Ok(out)
    }

    fn filler_atoms(&self, _size: usize, n: usize, skip: &dyn Fn(&Atom) -> bool, rng: &mut ChaCha8Rng) -> Vec<Atom> {
        let k = self.alphabet().len() as Symbol;
        let mut out = Vec::new();
        for attempt in 0..n * 50 {
            let len = rng.gen_range(0..=2 + attempt / 20);
            let w = Atom::Word((0..len).map(|_| rng.gen_range(0..k)).collect());
            if !skip(&w) && !out.contains(&w) {
                out.push(w);
                if out.len() == n {
                    break;
                }
            }
        }
        out.shuffle(rng);
        out
    }

    fn conflict_core(&self, kb: &KnowledgeBase, size: usize) -> Result<Option<BTreeSet<EntryId>>> {
        match self.synth.unsat_core(kb, size) {
            Ok(core) => Ok(Some(core)),
            Err(Error::Satisfiable) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn prior_rejects(&self, atom: &Atom) -> bool {
        match (&self.synth.prior, atom) {
            (Some(p), Atom::Word(w)) => !p.accepts_word(w),
            _ => false,
        }
    }
}

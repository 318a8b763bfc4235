//! Size-bounded DFA identification from a knowledge base.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::atom::{Alphabet, Atom};
use crate::consistency::is_consistent;
use crate::dfa::automaton::Dfa;
use crate::dfa::encode::{encode, Encoding, SymmetryBreaking};
use crate::dfa::prefix_tree::build_prefix_tree;
use crate::dfa::sat::{Batsat, SatResult, SatSolver};
use crate::error::{Error, Result};
use crate::knowledge::{EntryId, Fact, KnowledgeBase};
use crate::label::{MemLabel, PrefLabel};

/// Entry sets up to this size are shrunk to a subset-minimal core.
const MINIMIZE_CORE_UP_TO: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub symmetry: SymmetryBreaking,
    /// Raw models examined per enumeration before giving up.
    pub max_models: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            symmetry: SymmetryBreaking::Auto,
            max_models: 2000,
        }
    }
}

/// Distinct languages found by one enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Minimized automata, pairwise language-distinct, in discovery order.
    pub dfas: Vec<Dfa>,
    /// True when the solver proved there are no further models.
    pub exhausted: bool,
}

#[derive(Clone, Debug)]
pub struct Synthesizer {
    pub alphabet: Alphabet,
    pub options: SynthOptions,
    /// Every returned automaton is intersected with this one.
    pub prior: Option<Dfa>,
}

struct Loaded {
    enc: Encoding,
    solver: Batsat,
}

impl Synthesizer {
    pub fn new(alphabet: Alphabet) -> Self {
        Synthesizer {
            alphabet,
            options: SynthOptions::default(),
            prior: None,
        }
    }

    pub fn with_prior(mut self, prior: Dfa) -> Result<Self> {
        self.alphabet.same_as(prior.alphabet())?;
        self.prior = Some(prior);
        Ok(self)
    }

    /// The constraints `kb` places on the automaton before conjunction with
    /// the prior: facts about words the prior rejects either vanish or
    /// become rejections of the other word.
    fn relative_to_prior(&self, kb: &KnowledgeBase) -> KnowledgeBase {
        let Some(prior) = &self.prior else { return kb.clone() };
        let allowed = |a: &Atom| a.as_word().map(|w| prior.accepts_word(w)).unwrap_or(true);
        kb.map_facts(|entry| match &entry.fact {
            fact @ Fact::Mem { atom, label } => (label.is_member() || allowed(atom)).then(|| fact.clone()),
            Fact::Pref { lhs, rhs, label } => match (label, allowed(lhs), allowed(rhs)) {
                (PrefLabel::Incomparable, ..) | (_, true, true) => Some(entry.fact.clone()),
                (PrefLabel::Less, false, _) | (PrefLabel::Equiv, false, false) => None,
                (PrefLabel::Less | PrefLabel::Equiv, true, false) => Some(Fact::mem(lhs.clone(), MemLabel::NonMember)),
                (PrefLabel::Equiv, false, true) => Some(Fact::mem(rhs.clone(), MemLabel::NonMember)),
                (PrefLabel::Greater, ..) => unreachable!("stored preferences are normalized"),
            },
        })
    }

    fn load(&self, kb: &KnowledgeBase, k: usize, seed: u64) -> Result<Loaded> {
        let kb = &self.relative_to_prior(kb);
        let tree = build_prefix_tree(kb, &self.alphabet)?;
        let mut enc = encode(&tree, kb, &self.alphabet, k, self.options.symmetry)?;
        if let Some(prior) = &self.prior {
            // Transitions on symbols the prior never accepts through cannot
            // change the conjunction; pinning them removes duplicate models.
            for a in prior.killing_symbols() {
                for i in 0..k {
                    let lit = enc.y(i, a as usize, 0);
                    enc.cnf.add(vec![lit]);
                }
            }
        }
        let mut solver = Batsat::new(seed);
        solver.add_cnf(&enc.cnf);
        Ok(Loaded { enc, solver })
    }

    fn finish(&self, raw: &Dfa) -> Result<Dfa> {
        Ok(match &self.prior {
            Some(p) => raw.conjunction(p)?.minimize(),
            None => raw.minimize(),
        })
    }

    /// Up to `want` pairwise distinct languages of at most `k` states that are
    /// consistent with `kb`.
    pub fn enumerate(&self, kb: &KnowledgeBase, k: usize, want: usize, seed: u64) -> Result<Enumeration> {
        let Loaded { enc, mut solver } = self.load(kb, k, seed)?;
        let assumptions = enc.assumptions();
        let mut seen = HashSet::new();
        let mut dfas = Vec::new();
        let mut models = 0;
        let mut exhausted = false;
        while dfas.len() < want && models < self.options.max_models {
            if solver.solve(&assumptions) == SatResult::Unsat {
                exhausted = true;
                break;
            }
            models += 1;
            let raw = enc.decode(&self.alphabet, |v| solver.value(v))?;
            solver.add_clause(&enc.blocking_clause(&raw));
            let dfa = self.finish(&raw)?;
            if self.prior.is_some() && !is_consistent(&dfa, kb) {
                continue;
            }
            if seen.insert(dfa.clone()) {
                dfas.push(dfa);
            }
        }
        Ok(Enumeration { dfas, exhausted })
    }

    pub fn synthesize(&self, kb: &KnowledgeBase, k: usize, want: usize, seed: u64) -> Result<Vec<Dfa>> {
        Ok(self.enumerate(kb, k, want, seed)?.dfas)
    }

    /// The least `k ≤ k_max` admitting a consistent automaton, with one witness.
    pub fn min_size(&self, kb: &KnowledgeBase, k_max: usize, seed: u64) -> Result<(usize, Dfa)> {
        for k in 1..=k_max {
            if let Some(d) = self.synthesize(kb, k, 1, seed)?.into_iter().next() {
                return Ok((k, d));
            }
        }
        Err(Error::NoConsistentConcept(k_max))
    }

    /// Entries that together admit no automaton of at most `k` states.
    /// Subset-minimal whenever the solver's first core is small.
    pub fn unsat_core(&self, kb: &KnowledgeBase, k: usize) -> Result<BTreeSet<EntryId>> {
        let Loaded { enc, mut solver } = self.load(kb, k, 0)?;
        let all = enc.assumptions();
        if solver.solve(&all) == SatResult::Sat {
            return Err(Error::Satisfiable);
        }
        let mut core: Vec<i32> = all.iter().copied().filter(|&l| solver.in_core(l)).collect();
        if core.len() <= MINIMIZE_CORE_UP_TO {
            let mut i = 0;
            while i < core.len() {
                let trial: Vec<i32> = core
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &l)| l)
                    .collect();
                if solver.solve(&trial) == SatResult::Unsat {
                    core = trial.into_iter().filter(|&l| solver.in_core(l)).collect();
                } else {
                    i += 1;
                }
            }
        }
        let ids = enc
            .activations
            .iter()
            .filter(|(_, l)| core.contains(l))
            .map(|&(id, _)| id)
            .collect();
        Ok(ids)
    }

    /// Number of distinct consistent languages of at most `k` states, capped.
    pub fn count_consistent(&self, kb: &KnowledgeBase, k: usize, cap: usize) -> Result<usize> {
        let mut unbounded = self.clone();
        unbounded.options.max_models = usize::MAX;
        Ok(unbounded.enumerate(kb, k, cap, 0)?.dfas.len())
    }
}

pub fn synthesize(alphabet: &Alphabet, kb: &KnowledgeBase, k: usize, want: usize, seed: u64) -> Result<Vec<Dfa>> {
    Synthesizer::new(alphabet.clone()).synthesize(kb, k, want, seed)
}

pub fn min_size_synthesize(alphabet: &Alphabet, kb: &KnowledgeBase, k_max: usize) -> Result<(usize, Dfa)> {
    Synthesizer::new(alphabet.clone()).min_size(kb, k_max, 0)
}

pub fn unsat_core(alphabet: &Alphabet, kb: &KnowledgeBase, k: usize) -> Result<BTreeSet<EntryId>> {
    Synthesizer::new(alphabet.clone()).unsat_core(kb, k)
}

pub fn count_consistent(alphabet: &Alphabet, kb: &KnowledgeBase, k: usize, cap: usize) -> Result<usize> {
    Synthesizer::new(alphabet.clone()).count_consistent(kb, k, cap)
}

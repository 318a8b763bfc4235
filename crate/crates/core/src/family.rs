//! Concept families the learner can search, indexed by a size.

use std::collections::BTreeSet;
use std::fmt::Debug;

use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::atom::{Atom, Universe};
use crate::consistency::Concept;
use crate::error::Result;
use crate::knowledge::{EntryId, KnowledgeBase};

/// Concepts consistent with the knowledge base at one size.
#[derive(Clone, Debug)]
pub struct Survey<C> {
    /// Up to α concepts to distinguish this round.
    pub psi: Vec<C>,
    /// Pairwise distinct consistent concepts, `psi` first; used to estimate
    /// surviving fractions.
    pub pool: Vec<C>,
    /// The pool is every consistent concept at this size.
    pub exact: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SurveyParams {
    pub alpha: usize,
    pub mc_samples: usize,
}

pub trait Family: Send + Sync {
    type Concept: Concept + Clone + PartialEq + Debug + Serialize + DeserializeOwned + Send + Sync;

    fn universe(&self) -> Universe;

    fn initial_size(&self) -> usize;

    /// The next size up, or `None` at the cap.
    fn next_size(&self, size: usize) -> Option<usize>;

    fn survey(
        &self,
        kb: &KnowledgeBase,
        size: usize,
        params: SurveyParams,
        rng: &mut ChaCha8Rng,
    ) -> Result<Survey<Self::Concept>>;

    /// Up to `per_side` atoms in `a \ b` and up to `per_side` in `b \ a`,
    /// skipping atoms `skip` rejects.
    #[allow(clippy::too_many_arguments)]
    fn distinguishing_atoms(
        &self,
        a: &Self::Concept,
        b: &Self::Concept,
        size: usize,
        pool: &[Self::Concept],
        per_side: usize,
        skip: &dyn Fn(&Atom) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Atom>>;

    /// Arbitrary atoms used to pad a short distinguishing set.
    fn filler_atoms(&self, size: usize, n: usize, skip: &dyn Fn(&Atom) -> bool, rng: &mut ChaCha8Rng) -> Vec<Atom>;

    /// Entries jointly admitting no concept of this size, when the family can
    /// compute one.
    fn conflict_core(&self, _kb: &KnowledgeBase, _size: usize) -> Result<Option<BTreeSet<EntryId>>> {
        Ok(None)
    }

    /// Atoms known to lie outside every concept of the family.
    fn prior_rejects(&self, _atom: &Atom) -> bool {
        false
    }
}

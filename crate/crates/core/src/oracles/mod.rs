//! Simulated teachers answering membership, comparison and equivalence queries.

mod equivalence;
mod noise;
mod orders;

use std::sync::Arc;

pub use equivalence::{dfa_equivalence, DfaEquivalence};
pub use noise::{with_noise, Noisy};
pub use orders::{tomita_order, CostOrder, RandomMemRepOrder, RandomOrderParams, TomitaSemanticOrder};

use crate::atom::Atom;
use crate::consistency::{Concept, FnConcept};
use crate::label::{MemLabel, PrefLabel};

pub type SharedConcept = Arc<dyn Concept + Send + Sync>;

/// Everything a learner may ask; `H` is the hypothesis type of equivalence queries.
pub trait Teacher<H> {
    fn membership(&mut self, atom: &Atom) -> MemLabel;

    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel;

    /// `None` accepts the hypothesis; otherwise a counterexample with its true label.
    fn equivalence(&mut self, hypothesis: &H) -> Option<(Atom, MemLabel)>;
}

pub trait PreferenceOrder: Send {
    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel;
}

pub trait EquivalenceOracle<H>: Send {
    fn counterexample(&mut self, hypothesis: &H) -> Option<(Atom, MemLabel)>;
}

/// A noise-free teacher assembled from a target, an order and an
/// equivalence oracle.
pub struct SimulatedTeacher<H> {
    target: SharedConcept,
    order: Box<dyn PreferenceOrder>,
    equivalence: Box<dyn EquivalenceOracle<H>>,
}

impl<H> SimulatedTeacher<H> {
    pub fn new(
        target: SharedConcept,
        order: impl PreferenceOrder + 'static,
        equivalence: impl EquivalenceOracle<H> + 'static,
    ) -> Self {
        SimulatedTeacher {
            target,
            order: Box::new(order),
            equivalence: Box::new(equivalence),
        }
    }

    pub fn target(&self) -> &SharedConcept {
        &self.target
    }
}

impl<H> Teacher<H> for SimulatedTeacher<H> {
    fn membership(&mut self, atom: &Atom) -> MemLabel {
        MemLabel::from_bool(self.target.contains(atom))
    }

    fn compare(&mut self, x: &Atom, y: &Atom) -> PrefLabel {
        self.order.compare(x, y)
    }

    fn equivalence(&mut self, hypothesis: &H) -> Option<(Atom, MemLabel)> {
        self.equivalence.counterexample(hypothesis)
    }
}

pub type CostFn = Arc<dyn Fn(&Atom) -> f64 + Send + Sync>;

/// Teacher for `φ(x) = [c(x) ≤ δ]`, preferring cheaper atoms.
pub fn cost_threshold_teacher<H>(
    cost: CostFn,
    delta: f64,
    equivalence: impl EquivalenceOracle<H> + 'static,
) -> SimulatedTeacher<H> {
    let c = cost.clone();
    let target: SharedConcept = Arc::new(FnConcept(move |a: &Atom| c(a) <= delta));
    SimulatedTeacher::new(target, CostOrder::new(cost), equivalence)
}

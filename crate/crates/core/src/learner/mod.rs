//! The learning loop: survey consistent concepts, query, escalate the size
//! index, confirm with the equivalence oracle, and recover from bad answers.

mod machine;
mod transcript;

pub use machine::Learner;
pub use transcript::{QueryKind, RoundRecord, Summary, Transcript};

use serde::{Deserialize, Serialize};

use crate::atom::Atom;
use crate::error::Result;
use crate::family::Family;
use crate::hasse::ViolationReport;
use crate::label::{MemLabel, PrefLabel};
use crate::oracles::Teacher;
use crate::strategy::{CostModel, StrategyConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMode {
    /// Contradictions end the run once no concept fits.
    #[default]
    Off,
    /// Untrusted entries behind a contradiction are deactivated automatically.
    DropCore,
    /// Contradictions are reported to the teacher, who retracts entries.
    Interactive,
}

pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

fn default_max_rounds() -> usize {
    DEFAULT_MAX_ROUNDS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub cost: CostModel,
    #[serde(default)]
    pub strategy: StrategyConfig,
    /// Upper bound on queries of all kinds.
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
    #[serde(default)]
    pub recovery: RecoveryMode,
    #[serde(default)]
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(cost: CostModel, seed: u64) -> Self {
        LearnerConfig {
            cost,
            strategy: StrategyConfig::default(),
            max_rounds: DEFAULT_MAX_ROUNDS,
            recovery: RecoveryMode::Off,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.strategy.validate()?;
        if self.max_rounds == 0 {
            return Err(crate::Error::parameter("max_rounds", 0, "≥ 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query<C> {
    Membership { atom: Atom },
    Preference { lhs: Atom, rhs: Atom },
    Equivalence { hypothesis: C },
}

impl<C> Query<C> {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Membership { .. } => QueryKind::Membership,
            Query::Preference { .. } => QueryKind::Preference,
            Query::Equivalence { .. } => QueryKind::Equivalence,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    Mem(MemLabel),
    /// The label of `C(lhs, rhs)` for the pending pair.
    Pref(PrefLabel),
    /// `None` accepts the hypothesis.
    Equiv(Option<(Atom, MemLabel)>),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    #[error("no consistent concept up to size {size}")]
    NoConsistentConcept { size: usize },
    #[error("query limit of {limit} reached")]
    RoundLimit { limit: usize },
    #[error("the answers contradict each other")]
    UnresolvedViolations { report: ViolationReport },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<C> {
    Learned(C),
    Failed(Failure),
}

impl<C> Outcome<C> {
    pub fn concept(&self) -> Option<&C> {
        match self {
            Outcome::Learned(c) => Some(c),
            Outcome::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step<C> {
    Query {
        nonce: u64,
        query: Query<C>,
    },
    /// Waiting for the teacher to retract some of the reported entries.
    Violation(ViolationReport),
    Finished(Outcome<C>),
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct Run<C> {
    pub outcome: Outcome<C>,
    pub transcript: Transcript,
    pub summary: Summary,
}

/// Runs a learner against a simulated teacher until it finishes. A violation
/// prompt, which needs a human to resolve, ends the run as a failure.
pub fn learn<F: Family>(
    family: F,
    config: LearnerConfig,
    teacher: &mut dyn Teacher<F::Concept>,
) -> Result<Run<F::Concept>> {
    let mut learner = Learner::new(family, config)?;
    run_to_end(&mut learner, teacher)
}

pub fn run_to_end<F: Family>(
    learner: &mut Learner<F>,
    teacher: &mut dyn Teacher<F::Concept>,
) -> Result<Run<F::Concept>> {
    let outcome = loop {
        match learner.poll()? {
            Step::Query { nonce, query } => {
                let answer = match &query {
                    Query::Membership { atom } => Answer::Mem(teacher.membership(atom)),
                    Query::Preference { lhs, rhs } => Answer::Pref(teacher.compare(lhs, rhs)),
                    Query::Equivalence { hypothesis } => Answer::Equiv(teacher.equivalence(hypothesis)),
                };
                learner.answer(nonce, answer)?;
            }
            Step::Violation(report) => break Outcome::Failed(Failure::UnresolvedViolations { report }),
            Step::Finished(outcome) => break outcome,
        }
    };
    Ok(Run {
        outcome,
        transcript: learner.transcript().clone(),
        summary: learner.summary()?,
    })
}

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::transcript::{QueryKind, RoundRecord, Summary, Transcript};
use super::{Answer, Failure, LearnerConfig, Outcome, Query, RecoveryMode, Step};
use crate::atom::{Atom, Universe};
use crate::consistency::Concept;
use crate::error::{Error, Result};
use crate::family::{Family, SurveyParams};
use crate::hasse::{detect_violations, Violation, ViolationKind, ViolationReport};
use crate::knowledge::{EntryId, Fact, KnowledgeBase, Source};
use crate::label::MemLabel;
use crate::strategy::{
    historical_advice, pessimistic_advice, select_arms, Advice, ArmEstimate, ArmKind, BanditState,
    Outcome as ArmOutcome,
};

#[derive(Clone, Debug)]
struct Round {
    arm: ArmKind,
    estimate: ArmEstimate,
    advice: [Advice; 2],
}

#[derive(Clone, Debug)]
struct Pending<C> {
    nonce: u64,
    query: Query<C>,
    round: Option<Round>,
}

#[derive(Clone, Debug)]
enum Phase<C> {
    Running,
    AwaitingRetraction(ViolationReport),
    Finished(Outcome<C>),
}

/// The learning loop as a resumable state machine: [`Learner::poll`] yields
/// the next query, [`Learner::answer`] feeds the teacher's reply back in.
/// Everything is a function of the configuration and the answers received,
/// so replaying the same answers reproduces the same session.
pub struct Learner<F: Family> {
    family: F,
    config: LearnerConfig,
    universe: Universe,
    kb: KnowledgeBase,
    size: usize,
    rng: ChaCha8Rng,
    bandit: BanditState,
    quarantined_atoms: BTreeSet<Atom>,
    quarantined_pairs: BTreeSet<(Atom, Atom)>,
    pending: Option<Pending<F::Concept>>,
    phase: Phase<F::Concept>,
    transcript: Transcript,
    nonce: u64,
}

fn pair_key(x: &Atom, y: &Atom) -> (Atom, Atom) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

impl<F: Family> Learner<F> {
    pub fn new(family: F, config: LearnerConfig) -> Result<Self> {
        Self::with_knowledge(family, config, KnowledgeBase::new())
    }

    /// Starts from an existing knowledge base instead of an empty one. Its
    /// contradictions are handled right away unless recovery is off.
    pub fn with_knowledge(family: F, config: LearnerConfig, kb: KnowledgeBase) -> Result<Self> {
        config.validate()?;
        let universe = family.universe();
        for e in kb.active() {
            for a in e.fact.atoms() {
                universe.check(a)?;
            }
        }
        let mut learner = Learner {
            size: family.initial_size(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            bandit: BanditState::new(config.strategy.eta),
            universe,
            family,
            config,
            kb,
            quarantined_atoms: BTreeSet::new(),
            quarantined_pairs: BTreeSet::new(),
            pending: None,
            phase: Phase::Running,
            transcript: Transcript::default(),
            nonce: 0,
        };
        learner.after_answer()?;
        Ok(learner)
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn knowledge(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn bandit(&self) -> &BanditState {
        &self.bandit
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn outcome(&self) -> Option<&Outcome<F::Concept>> {
        match &self.phase {
            Phase::Finished(o) => Some(o),
            _ => None,
        }
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.phase, Phase::Finished(_))
    }

    /// The current pending query, violation prompt or final outcome,
    /// computing the next query if none is pending.
    pub fn poll(&mut self) -> Result<Step<F::Concept>> {
        if matches!(self.phase, Phase::Running) && self.pending.is_none() {
            self.advance()?;
        }
        Ok(match (&self.phase, &self.pending) {
            (Phase::Finished(o), _) => Step::Finished(o.clone()),
            (Phase::AwaitingRetraction(r), _) => Step::Violation(r.clone()),
            (Phase::Running, Some(p)) => Step::Query {
                nonce: p.nonce,
                query: p.query.clone(),
            },
            (Phase::Running, None) => unreachable!("advance leaves a pending query or leaves the running phase"),
        })
    }

    pub fn answer(&mut self, nonce: u64, answer: Answer) -> Result<()> {
        match &self.phase {
            Phase::Finished(_) => return Err(Error::Finished),
            Phase::AwaitingRetraction(_) => return Err(Error::NoPendingQuery),
            Phase::Running => {}
        }
        let pending = self.pending.as_ref().ok_or(Error::NoPendingQuery)?;
        if pending.nonce != nonce {
            return Err(Error::StaleNonce {
                expected: pending.nonce,
                got: nonce,
            });
        }
        let weights = self.bandit.weights();
        let mut record = RoundRecord {
            round: self.transcript.records.len() + 1,
            size: self.size,
            kind: QueryKind::Membership,
            atoms: Vec::new(),
            hypothesis: None,
            answer: Value::Null,
            entry: None,
            loss: None,
            pool_before: None,
            pool_after: None,
            expert_weights: weights,
            dropped: Vec::new(),
        };
        let arm_outcome = match (&pending.query, &answer) {
            (Query::Membership { atom }, Answer::Mem(label)) => {
                record.atoms = vec![self.universe.encode(atom)?];
                record.answer = json!(label.token());
                record.entry = Some(self.kb.add(Fact::mem(atom.clone(), *label), Source::Query));
                ArmOutcome::Mem(*label)
            }
            (Query::Preference { lhs, rhs }, Answer::Pref(label)) => {
                record.kind = QueryKind::Preference;
                record.atoms = vec![self.universe.encode(lhs)?, self.universe.encode(rhs)?];
                record.answer = json!(label.token());
                record.entry = Some(self.kb.add(Fact::pref(lhs.clone(), rhs.clone(), *label), Source::Query));
                ArmOutcome::Pref(*label)
            }
            (Query::Equivalence { hypothesis }, Answer::Equiv(reply)) => {
                record.kind = QueryKind::Equivalence;
                record.hypothesis = Some(serde_json::to_value(hypothesis)?);
                let hypothesis = hypothesis.clone();
                match reply {
                    None => {
                        record.answer = json!("accept");
                        self.pending = None;
                        self.transcript.push(record);
                        self.phase = Phase::Finished(Outcome::Learned(hypothesis));
                        return Ok(());
                    }
                    Some((atom, label)) => {
                        self.universe.check(atom)?;
                        if hypothesis.contains(atom) == label.is_member() {
                            return Err(Error::NotACounterexample);
                        }
                        record.atoms = vec![self.universe.encode(atom)?];
                        record.answer =
                            json!({ "counterexample": self.universe.encode(atom)?, "label": label.token() });
                        record.entry = Some(self.kb.add(Fact::mem(atom.clone(), *label), Source::Counterexample));
                    }
                }
                self.pending = None;
                self.transcript.push(record);
                return self.after_answer();
            }
            (Query::Membership { .. }, _) => return Err(Error::AnswerKind { expected: "membership" }),
            (Query::Preference { .. }, _) => return Err(Error::AnswerKind { expected: "preference" }),
            (Query::Equivalence { .. }, _) => {
                return Err(Error::AnswerKind {
                    expected: "equivalence",
                })
            }
        };
        if let Some(round) = &pending.round {
            let after = round.estimate.survivors(arm_outcome);
            let loss = self.config.cost.loss(round.arm, round.estimate.pool, after);
            self.bandit.update(&round.advice, round.arm, loss);
            self.bandit.record(round.arm, loss);
            record.loss = Some(loss);
            record.pool_before = Some(round.estimate.pool);
            record.pool_after = Some(after);
        }
        self.pending = None;
        self.transcript.push(record);
        self.after_answer()
    }

    /// Deactivates entries on the teacher's request and resumes. Retracting
    /// nothing while a query is pending leaves that query in place.
    pub fn retract(&mut self, ids: &[EntryId]) -> Result<()> {
        if self.is_finished() {
            return Err(Error::Finished);
        }
        for id in ids {
            if self.kb.get(*id).is_none() {
                return Err(Error::malformed("entry id", id.0));
            }
        }
        if ids.is_empty() && matches!(self.phase, Phase::Running) {
            return Ok(());
        }
        for id in ids {
            self.kb.set_active(*id, false)?;
        }
        self.transcript.note_dropped(ids);
        self.pending = None;
        self.size = self.family.initial_size();
        self.phase = Phase::Running;
        if self.config.recovery == RecoveryMode::Interactive {
            self.check_violations()?;
        }
        Ok(())
    }

    pub fn summary(&self) -> Result<Summary> {
        let t = &self.transcript;
        let result = match &self.phase {
            Phase::Finished(Outcome::Learned(c)) => json!({ "concept": serde_json::to_value(c)? }),
            Phase::Finished(Outcome::Failed(f)) => json!({ "failure": serde_json::to_value(f)? }),
            _ => Value::Null,
        };
        Ok(Summary {
            n_mem: t.n_mem,
            n_pref: t.n_pref,
            n_equiv: t.n_equiv,
            cost_total: t.cost_total(&self.config.cost),
            success: matches!(self.phase, Phase::Finished(Outcome::Learned(_))),
            dropped: t.dropped(),
            final_size: self.size,
            result,
        })
    }

    fn finish(&mut self, failure: Failure) {
        self.pending = None;
        self.phase = Phase::Finished(Outcome::Failed(failure));
    }

    fn after_answer(&mut self) -> Result<()> {
        if self.config.recovery != RecoveryMode::Off {
            self.check_violations()?;
        }
        Ok(())
    }

    fn check_violations(&mut self) -> Result<()> {
        let report = detect_violations(&self.kb);
        if report.is_empty() {
            return Ok(());
        }
        match self.config.recovery {
            RecoveryMode::Off => {}
            RecoveryMode::DropCore => {
                let ids = self.untrusted(&report.entries());
                if !ids.is_empty() {
                    self.drop_entries(&ids)?;
                }
            }
            RecoveryMode::Interactive => {
                self.pending = None;
                self.phase = Phase::AwaitingRetraction(report);
            }
        }
        Ok(())
    }

    fn untrusted(&self, ids: &BTreeSet<EntryId>) -> Vec<EntryId> {
        ids.iter()
            .copied()
            .filter(|id| self.kb.get(*id).is_some_and(|e| e.active && !e.source.trusted()))
            .collect()
    }

    /// Deactivates entries and keeps the learner from asking them again.
    fn drop_entries(&mut self, ids: &[EntryId]) -> Result<()> {
        for id in ids {
            let entry = self.kb.get(*id).ok_or_else(|| Error::malformed("entry id", id.0))?;
            match &entry.fact {
                Fact::Mem { atom, .. } => {
                    self.quarantined_atoms.insert(atom.clone());
                }
                Fact::Pref { lhs, rhs, .. } => {
                    self.quarantined_pairs.insert(pair_key(lhs, rhs));
                }
            }
            self.kb.set_active(*id, false)?;
        }
        self.transcript.note_dropped(ids);
        self.pending = None;
        self.size = self.family.initial_size();
        Ok(())
    }

    fn ask(&mut self, query: Query<F::Concept>, round: Option<Round>) {
        self.nonce += 1;
        self.pending = Some(Pending {
            nonce: self.nonce,
            query,
            round,
        });
    }

    /// Runs until a query is pending or the phase changes.
    fn advance(&mut self) -> Result<()> {
        let params = SurveyParams {
            alpha: self.config.strategy.alpha,
            mc_samples: self.config.strategy.mc_samples,
        };
        loop {
            if self.transcript.queries() >= self.config.max_rounds {
                self.finish(Failure::RoundLimit {
                    limit: self.config.max_rounds,
                });
                return Ok(());
            }
            let survey = self.family.survey(&self.kb, self.size, params, &mut self.rng)?;
            match survey.pool.len() {
                0 => {
                    if !self.no_concept_at_size()? {
                        return Ok(());
                    }
                    continue;
                }
                1 => {
                    let hypothesis = survey.pool.into_iter().next().expect("one concept");
                    self.ask(Query::Equivalence { hypothesis }, None);
                    return Ok(());
                }
                _ => {}
            }

            let x = self.distinguishing_set(&survey.psi, &survey.pool)?;
            if self.label_from_prior(&x) {
                continue;
            }
            let blocked_atom = |a: &Atom| self.quarantined_atoms.contains(a);
            let blocked_pair = |a: &Atom, b: &Atom| self.quarantined_pairs.contains(&pair_key(a, b));
            let cands = select_arms(&survey.psi, &survey.pool, x, &self.kb, &blocked_atom, &blocked_pair);
            let cost = &self.config.cost;
            let available = [
                cands.mem.is_some() && cost.allows(ArmKind::Membership),
                cands.pref.is_some() && cost.allows(ArmKind::Preference),
            ];
            if !available.iter().any(|&a| a) {
                // Nothing left to ask that separates the samples; let the
                // equivalence oracle break the tie.
                let hypothesis = survey.psi.into_iter().next().expect("at least two concepts");
                self.ask(Query::Equivalence { hypothesis }, None);
                return Ok(());
            }
            let temp = self.config.strategy.softmax_temp;
            let advice = [
                pessimistic_advice(&cands, cost, temp),
                historical_advice(&self.bandit, available, temp),
            ];
            let (_, arm) = self.bandit.sample(&advice, &mut self.rng);
            let (query, estimate) = match arm {
                ArmKind::Membership => {
                    let (atom, est) = cands.mem.expect("membership arm available");
                    (Query::Membership { atom }, est)
                }
                ArmKind::Preference => {
                    let ((lhs, rhs), est) = cands.pref.expect("preference arm available");
                    (Query::Preference { lhs, rhs }, est)
                }
            };
            self.ask(query, Some(Round { arm, estimate, advice }));
            return Ok(());
        }
    }

    /// Atoms separating every pair of sampled concepts, at most β of them,
    /// padded to α.
    fn distinguishing_set(&mut self, psi: &[F::Concept], pool: &[F::Concept]) -> Result<Vec<Atom>> {
        let (alpha, beta) = (self.config.strategy.alpha, self.config.strategy.beta);
        let pairs = psi.len() * psi.len().saturating_sub(1) / 2;
        let per_side = (beta / (2 * pairs.max(1))).max(1);
        let kb = &self.kb;
        let quarantined = &self.quarantined_atoms;
        let skip = |a: &Atom| kb.membership(a).is_some() || quarantined.contains(a);
        let mut x: Vec<Atom> = Vec::new();
        'pairs: for i in 0..psi.len() {
            for j in i + 1..psi.len() {
                let found = self.family.distinguishing_atoms(
                    &psi[i],
                    &psi[j],
                    self.size,
                    pool,
                    per_side,
                    &skip,
                    &mut self.rng,
                )?;
                for a in found {
                    if !x.contains(&a) {
                        x.push(a);
                        if x.len() == beta {
                            break 'pairs;
                        }
                    }
                }
            }
        }
        if x.len() < alpha {
            let skip_x = |a: &Atom| skip(a) || x.contains(a);
            let filler = self
                .family
                .filler_atoms(self.size, alpha - x.len(), &skip_x, &mut self.rng);
            x.extend(filler);
        }
        Ok(x)
    }

    /// Records atoms of `x` the family rules out a priori; true if any were new.
    fn label_from_prior(&mut self, x: &[Atom]) -> bool {
        let mut added = false;
        for a in x {
            if self.kb.membership(a).is_none() && self.family.prior_rejects(a) {
                self.kb.add(Fact::mem(a.clone(), MemLabel::NonMember), Source::Prior);
                self.transcript.n_prior += 1;
                added = true;
            }
        }
        added
    }

    /// Escalates, recovers or fails when no concept of the current size is
    /// consistent. Returns whether to keep searching.
    fn no_concept_at_size(&mut self) -> Result<bool> {
        if let Some(next) = self.family.next_size(self.size) {
            self.size = next;
            return Ok(true);
        }
        match self.config.recovery {
            RecoveryMode::Off => {
                let report = detect_violations(&self.kb);
                if report.is_empty() {
                    self.finish(Failure::NoConsistentConcept { size: self.size });
                } else {
                    self.finish(Failure::UnresolvedViolations { report });
                }
                Ok(false)
            }
            RecoveryMode::DropCore => {
                let mut ids = match self.family.conflict_core(&self.kb, self.size)? {
                    Some(core) => self.untrusted(&core),
                    None => Vec::new(),
                };
                if ids.is_empty() {
                    ids = self.untrusted(&detect_violations(&self.kb).entries());
                }
                if ids.is_empty() {
                    self.finish(Failure::NoConsistentConcept { size: self.size });
                    return Ok(false);
                }
                self.drop_entries(&ids)?;
                Ok(true)
            }
            RecoveryMode::Interactive => {
                let mut report = detect_violations(&self.kb);
                if report.is_empty() {
                    let entries = match self.family.conflict_core(&self.kb, self.size)? {
                        Some(core) => core,
                        None => self.kb.active().map(|e| e.id).collect(),
                    };
                    report.violations.push(Violation {
                        kind: ViolationKind::Unsatisfiable,
                        entries,
                    });
                }
                self.phase = Phase::AwaitingRetraction(report);
                Ok(false)
            }
        }
    }
}

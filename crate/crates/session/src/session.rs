use memrep_core::family::Family;
use memrep_core::learner::{Answer, Learner, Outcome, Query, QueryKind, Step, Summary, Transcript};
use memrep_core::{EntryId, Fact, KnowledgeBase, Source, Universe, ViolationKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{FamilySpec, SessionConfig};
use crate::error::{Result, SessionError};
use crate::render::{legend, render, LegendEntry, Rendered};

pub const MEMBERSHIP_ANSWERS: [&str; 2] = ["in", "out"];
pub const PREFERENCE_ANSWERS: [&str; 4] = ["<", ">", "=", "||"];
pub const EQUIVALENCE_ANSWERS: [&str; 2] = ["accept", "counterexample"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub membership: usize,
    pub preference: usize,
    pub equivalence: usize,
}

impl Counts {
    fn of(t: &Transcript) -> Self {
        Counts {
            membership: t.n_mem,
            preference: t.n_pref,
            equivalence: t.n_equiv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryPayload {
    pub nonce: u64,
    pub kind: QueryKind,
    /// One atom for membership, two for preference (`lhs`, `rhs`), none
    /// for equivalence.
    pub atoms: Vec<Value>,
    pub rendered: Vec<Rendered>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Value>,
    pub allowed: Vec<String>,
    pub counts: Counts,
    pub cost_total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryView {
    pub id: EntryId,
    pub source: Source,
    /// `{"mem": [atom, label]}` or `{"pref": [lhs, rhs, label]}`.
    pub fact: Value,
    pub rendered: Vec<Rendered>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationView {
    pub kind: ViolationKind,
    pub entries: Vec<EntryView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultPayload {
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Value>,
    pub summary: Summary,
}

/// What the session is waiting for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SessionState {
    Query {
        query: QueryPayload,
    },
    /// Some answers contradict each other; retract entries to continue.
    Violation {
        violations: Vec<ViolationView>,
        counts: Counts,
        cost_total: f64,
    },
    Finished {
        result: ResultPayload,
    },
}

impl SessionState {
    pub fn is_finished(&self) -> bool {
        matches!(self, SessionState::Finished { .. })
    }
}

/// An accepted request, kept so a session can be rebuilt by replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Answer { nonce: u64, answer: Value },
    Retract { entries: Vec<EntryId> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub config: SessionConfig,
    pub events: Vec<Event>,
}

/// The learner operations a session needs, independent of the family.
trait Driver: Send {
    fn universe(&self) -> &Universe;
    fn state(&mut self) -> Result<SessionState>;
    fn answer(&mut self, nonce: u64, answer: &Value) -> Result<()>;
    fn retract(&mut self, ids: &[EntryId]) -> Result<()>;
    fn transcript(&self) -> &Transcript;
    fn summary(&self) -> Result<Summary>;
    fn knowledge(&self) -> &KnowledgeBase;
}

fn fact_json(universe: &Universe, fact: &Fact) -> Result<Value> {
    Ok(match fact {
        Fact::Mem { atom, label } => json!({ "mem": [universe.encode(atom)?, label.token()] }),
        Fact::Pref { lhs, rhs, label } => {
            json!({ "pref": [universe.encode(lhs)?, universe.encode(rhs)?, label.token()] })
        }
    })
}

fn token(answer: &Value) -> Result<&str> {
    answer
        .as_str()
        .ok_or_else(|| SessionError::BadAnswer(format!("expected an answer token, got {answer}")))
}

fn parse_answer<C>(universe: &Universe, query: &Query<C>, answer: &Value) -> Result<Answer> {
    let bad = |e: memrep_core::Error| SessionError::BadAnswer(e.to_string());
    Ok(match query {
        Query::Membership { .. } => Answer::Mem(token(answer)?.parse().map_err(bad)?),
        Query::Preference { .. } => Answer::Pref(token(answer)?.parse().map_err(bad)?),
        Query::Equivalence { .. } => match answer {
            Value::String(s) if s == "accept" => Answer::Equiv(None),
            Value::Object(o) => {
                let atom = o
                    .get("counterexample")
                    .ok_or_else(|| SessionError::BadAnswer("missing `counterexample`".into()))?;
                let label = o
                    .get("label")
                    .ok_or_else(|| SessionError::BadAnswer("missing `label`".into()))?;
                Answer::Equiv(Some((
                    universe.decode(atom).map_err(bad)?,
                    token(label)?.parse().map_err(bad)?,
                )))
            }
            other => {
                return Err(SessionError::BadAnswer(format!(
                    "expected \"accept\" or {{counterexample, label}}, got {other}"
                )))
            }
        },
    })
}

impl<F: Family + 'static> Driver for Learner<F> {
    fn universe(&self) -> &Universe {
        Learner::universe(self)
    }

    fn state(&mut self) -> Result<SessionState> {
        let step = self.poll()?;
        let counts = Counts::of(self.transcript());
        let cost_total = self.transcript().cost_total(&self.config().cost);
        let u = Learner::universe(self).clone();
        Ok(match step {
            Step::Query { nonce, query } => {
                let (atoms, hypothesis, allowed): (Vec<_>, _, &[&str]) = match &query {
                    Query::Membership { atom } => (vec![atom.clone()], None, &MEMBERSHIP_ANSWERS),
                    Query::Preference { lhs, rhs } => (vec![lhs.clone(), rhs.clone()], None, &PREFERENCE_ANSWERS),
                    Query::Equivalence { hypothesis } => (
                        Vec::new(),
                        Some(serde_json::to_value(hypothesis).map_err(memrep_core::Error::from)?),
                        &EQUIVALENCE_ANSWERS,
                    ),
                };
                SessionState::Query {
                    query: QueryPayload {
                        nonce,
                        kind: query.kind(),
                        atoms: atoms.iter().map(|a| u.encode(a)).collect::<Result<_, _>>()?,
                        rendered: atoms.iter().map(|a| render(&u, a)).collect(),
                        hypothesis,
                        allowed: allowed.iter().map(|s| s.to_string()).collect(),
                        counts,
                        cost_total,
                    },
                }
            }
            Step::Violation(report) => {
                let kb = self.knowledge();
                let mut violations = Vec::new();
                for v in &report.violations {
                    let mut entries = Vec::new();
                    for id in &v.entries {
                        let e = kb
                            .get(*id)
                            .ok_or_else(|| SessionError::Internal(format!("entry {} vanished", id.0)))?;
                        entries.push(EntryView {
                            id: *id,
                            source: e.source,
                            fact: fact_json(&u, &e.fact)?,
                            rendered: e.fact.atoms().map(|a| render(&u, a)).collect(),
                        });
                    }
                    violations.push(ViolationView { kind: v.kind, entries });
                }
                SessionState::Violation {
                    violations,
                    counts,
                    cost_total,
                }
            }
            Step::Finished(outcome) => {
                let (concept, failure) = match &outcome {
                    Outcome::Learned(c) => (Some(serde_json::to_value(c).map_err(memrep_core::Error::from)?), None),
                    Outcome::Failed(f) => (None, Some(serde_json::to_value(f).map_err(memrep_core::Error::from)?)),
                };
                SessionState::Finished {
                    result: ResultPayload {
                        success: concept.is_some(),
                        concept,
                        failure,
                        summary: self.summary()?,
                    },
                }
            }
        })
    }

    fn answer(&mut self, nonce: u64, answer: &Value) -> Result<()> {
        let Step::Query { nonce: pending, query } = self.poll()? else {
            return Err(if self.is_finished() {
                memrep_core::Error::Finished
            } else {
                memrep_core::Error::NoPendingQuery
            }
            .into());
        };
        if pending != nonce {
            return Err(memrep_core::Error::StaleNonce {
                expected: pending,
                got: nonce,
            }
            .into());
        }
        let parsed = parse_answer(Learner::universe(self), &query, answer)?;
        Ok(Learner::answer(self, nonce, parsed)?)
    }

    fn retract(&mut self, ids: &[EntryId]) -> Result<()> {
        Ok(Learner::retract(self, ids)?)
    }

    fn transcript(&self) -> &Transcript {
        Learner::transcript(self)
    }

    fn summary(&self) -> Result<Summary> {
        Ok(Learner::summary(self)?)
    }

    fn knowledge(&self) -> &KnowledgeBase {
        Learner::knowledge(self)
    }
}

/// One teaching session: a learner whose teacher is whoever calls
/// [`Session::answer`].
pub struct Session {
    id: String,
    config: SessionConfig,
    events: Vec<Event>,
    driver: Box<dyn Driver>,
}

fn start<F: Family + 'static>(family: F, config: &SessionConfig) -> Result<Box<dyn Driver>> {
    let universe = family.universe();
    let kb = match &config.knowledge {
        Some(v) => KnowledgeBase::from_json(&universe, v).map_err(|e| SessionError::Config(e.to_string()))?,
        None => KnowledgeBase::new(),
    };
    let learner =
        Learner::with_knowledge(family, config.learner.clone(), kb).map_err(|e| SessionError::Config(e.to_string()))?;
    Ok(Box::new(learner))
}

impl Session {
    pub fn new(id: impl Into<String>, config: SessionConfig) -> Result<Self> {
        let config_err = |e: SessionError| match e {
            SessionError::Core(e) => SessionError::Config(e.to_string()),
            other => other,
        };
        let driver = match &config.family {
            FamilySpec::Dfa { .. } => start(config.family.build_dfa().map_err(config_err)?, &config)?,
            FamilySpec::Grid { .. } => start(config.family.build_grid().map_err(config_err)?, &config)?,
        };
        Ok(Session {
            id: id.into(),
            config,
            events: Vec::new(),
            driver,
        })
    }

    /// Rebuilds a session by replaying its accepted requests.
    pub fn restore(snapshot: Snapshot) -> Result<Self> {
        let mut s = Session::new(snapshot.id, snapshot.config)?;
        for e in snapshot.events {
            match &e {
                Event::Answer { nonce, answer } => s.driver.answer(*nonce, answer)?,
                Event::Retract { entries } => s.driver.retract(entries)?,
            }
            s.events.push(e);
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            config: self.config.clone(),
            events: self.events.clone(),
        }
    }

    pub fn legend(&self) -> Vec<LegendEntry> {
        legend(self.driver.universe())
    }

    pub fn state(&mut self) -> Result<SessionState> {
        self.driver.state()
    }

    pub fn answer(&mut self, nonce: u64, answer: Value) -> Result<SessionState> {
        self.driver.answer(nonce, &answer)?;
        self.events.push(Event::Answer { nonce, answer });
        self.driver.state()
    }

    pub fn retract(&mut self, entries: Vec<EntryId>) -> Result<SessionState> {
        self.driver.retract(&entries)?;
        self.events.push(Event::Retract { entries });
        self.driver.state()
    }

    pub fn transcript(&self) -> &Transcript {
        self.driver.transcript()
    }

    pub fn summary(&self) -> Result<Summary> {
        self.driver.summary()
    }

    pub fn knowledge(&self) -> Result<Value> {
        Ok(self.driver.knowledge().to_json(self.driver.universe())?)
    }
}

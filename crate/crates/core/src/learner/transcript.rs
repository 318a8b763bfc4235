use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::knowledge::EntryId;
use crate::strategy::CostModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Membership,
    Preference,
    Equivalence,
}

/// One answered query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Size index the query was asked at.
    pub size: usize,
    pub kind: QueryKind,
    /// Queried atoms, encoded in the session's universe.
    pub atoms: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Value>,
    pub answer: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<EntryId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
    /// Consistent concepts in the estimation pool before and after the answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_before: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_after: Option<usize>,
    /// Expert weights (pessimistic, historical) in force when the arm was drawn.
    pub expert_weights: [f64; 2],
    /// Entries deactivated after this answer.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<EntryId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<RoundRecord>,
    pub n_mem: usize,
    pub n_pref: usize,
    pub n_equiv: usize,
    /// Labels supplied by a prior instead of the teacher; not queries.
    pub n_prior: usize,
    /// Entries deactivated before any query was answered.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped_initially: Vec<EntryId>,
}

impl Transcript {
    pub fn queries(&self) -> usize {
        self.n_mem + self.n_pref + self.n_equiv
    }

    pub fn push(&mut self, record: RoundRecord) {
        match record.kind {
            QueryKind::Membership => self.n_mem += 1,
            QueryKind::Preference => self.n_pref += 1,
            QueryKind::Equivalence => self.n_equiv += 1,
        }
        self.records.push(record);
    }

    pub fn note_dropped(&mut self, ids: &[EntryId]) {
        match self.records.last_mut() {
            Some(r) => r.dropped.extend_from_slice(ids),
            None => self.dropped_initially.extend_from_slice(ids),
        }
    }

    pub fn dropped(&self) -> usize {
        self.dropped_initially.len() + self.records.iter().map(|r| r.dropped.len()).sum::<usize>()
    }

    pub fn cost_total(&self, cost: &CostModel) -> f64 {
        cost.total(self.n_mem, self.n_pref)
    }

    /// One JSON object per record, newline terminated.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_mem: usize,
    pub n_pref: usize,
    pub n_equiv: usize,
    pub cost_total: f64,
    pub success: bool,
    pub dropped: usize,
    pub final_size: usize,
    /// The learned concept, or the failure.
    pub result: Value,
}

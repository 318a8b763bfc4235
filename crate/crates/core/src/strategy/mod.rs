//! Query selection: candidate arms, the two experts, and the exp4 bandit.

mod bandit;
mod candidates;
mod cost;
mod experts;

pub use bandit::BanditState;
pub use candidates::{select_arms, ArmEstimate, Candidates, Outcome};
pub use cost::{parse_cost, ArmKind, CostModel};
pub use experts::{historical_advice, pessimistic_advice, softmax, softmax_floor, Advice};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyConfig {
    /// Concepts sampled per round.
    pub alpha: usize,
    /// Maximum distinguishing atoms per round.
    pub beta: usize,
    pub eta: f64,
    pub softmax_temp: f64,
    /// Extra concepts sampled to estimate surviving fractions.
    pub mc_samples: usize,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            alpha: 2,
            beta: 4,
            eta: 0.5,
            softmax_temp: 0.2,
            mc_samples: 16,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.alpha < 2 {
            return Err(Error::parameter("alpha", self.alpha, "≥ 2"));
        }
        if self.beta < self.alpha {
            return Err(Error::parameter("beta", self.beta, "≥ alpha"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::parameter("eta", self.eta, "(0, ∞)"));
        }
        if !(self.softmax_temp > 0.0 && self.softmax_temp.is_finite()) {
            return Err(Error::parameter("softmax_temp", self.softmax_temp, "(0, ∞)"));
        }
        Ok(())
    }
}

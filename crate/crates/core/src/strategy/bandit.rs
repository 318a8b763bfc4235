use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cost::ArmKind;
use super::experts::Advice;

/// Log-weights are kept relative to the largest and never drop below this,
/// so every expert keeps a positive, finite weight.
const LOG_WEIGHT_FLOOR: f64 = -600.0;

/// exp4 over two experts (pessimistic, historical) and two arm kinds, plus
/// the loss history the historical expert reads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditState {
    pub eta: f64,
    pub log_weights: [f64; 2],
    pub loss_sum: [f64; 2],
    pub pulls: [u64; 2],
}

impl BanditState {
    pub const PESSIMISTIC: usize = 0;
    pub const HISTORICAL: usize = 1;

    pub fn new(eta: f64) -> Self {
        BanditState {
            eta,
            log_weights: [0.0; 2],
            loss_sum: [0.0; 2],
            pulls: [0; 2],
        }
    }

    /// Expert weights normalized to sum to one.
    pub fn weights(&self) -> [f64; 2] {
        let top = self.log_weights[0].max(self.log_weights[1]);
        let w = self.log_weights.map(|l| (l - top).exp());
        let total = w[0] + w[1];
        w.map(|x| x / total)
    }

    /// Probability of each arm kind under the weighted mixture of advice.
    pub fn mixture(&self, advice: &[Advice; 2]) -> Advice {
        let w = self.weights();
        [0, 1].map(|arm| w[0] * advice[0][arm] + w[1] * advice[1][arm])
    }

    /// Draws an expert by weight, then an arm from that expert's advice.
    pub fn sample<R: Rng + ?Sized>(&self, advice: &[Advice; 2], rng: &mut R) -> (usize, ArmKind) {
        let w = self.weights();
        let expert = usize::from(rng.gen::<f64>() >= w[0]);
        let p = advice[expert];
        let arm = if p[1] <= 0.0 || (p[0] > 0.0 && rng.gen::<f64>() < p[0]) {
            ArmKind::Membership
        } else {
            ArmKind::Preference
        };
        (expert, arm)
    }

    /// Importance-weighted exp4 update after pulling `arm` with `loss`.
    pub fn update(&mut self, advice: &[Advice; 2], arm: ArmKind, loss: f64) {
        let p = self.mixture(advice)[arm.index()];
        if p <= 0.0 {
            return;
        }
        let estimate = loss.clamp(0.0, 1.0) / p;
        for (e, lw) in self.log_weights.iter_mut().enumerate() {
            *lw -= self.eta * advice[e][arm.index()] * estimate;
        }
        let top = self.log_weights[0].max(self.log_weights[1]);
        for lw in &mut self.log_weights {
            *lw = (*lw - top).max(LOG_WEIGHT_FLOOR);
        }
    }

    /// Adds a realized loss to the history of its arm kind.
    pub fn record(&mut self, arm: ArmKind, loss: f64) {
        self.loss_sum[arm.index()] += loss;
        self.pulls[arm.index()] += 1;
    }

    pub fn average_loss(&self, arm: ArmKind) -> f64 {
        let i = arm.index();
        if self.pulls[i] == 0 {
            0.0
        } else {
            self.loss_sum[i] / self.pulls[i] as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_advice_keeps_weights_equal() {
        let mut s = BanditState::new(0.5);
        let advice = [[0.3, 0.7], [0.3, 0.7]];
        s.update(&advice, ArmKind::Preference, 0.8);
        assert_eq!(s.weights(), [0.5, 0.5]);
    }

    #[test]
    fn zero_loss_changes_nothing() {
        let mut s = BanditState::new(0.5);
        s.update(&[[1.0, 0.0], [0.0, 1.0]], ArmKind::Membership, 0.0);
        assert_eq!(s.weights(), [0.5, 0.5]);
    }

    #[test]
    fn expert_advising_the_free_arm_wins() {
        // Expert 0 always says membership (loss 0), expert 1 preference (loss 1).
        let advice = [[1.0, 0.0], [0.0, 1.0]];
        let mut s = BanditState::new(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let (_, arm) = s.sample(&advice, &mut rng);
            let loss = if arm == ArmKind::Membership { 0.0 } else { 1.0 };
            s.update(&advice, arm, loss);
        }
        let w = s.weights();
        assert!(w[0] / w[1] > 10.0);
    }

    proptest! {
        #[test]
        fn weights_stay_positive_and_finite(
            rounds in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, any::<bool>()), 1..300),
            eta in 0.01f64..5.0,
        ) {
            let mut s = BanditState::new(eta);
            for (p0, p1, loss, mem) in rounds {
                let advice = [[p0, 1.0 - p0], [p1, 1.0 - p1]];
                let arm = if mem { ArmKind::Membership } else { ArmKind::Preference };
                s.update(&advice, arm, loss);
                let w = s.weights();
                prop_assert!(w.iter().all(|x| x.is_finite() && *x > 0.0));
                prop_assert!((w[0] + w[1] - 1.0).abs() < 1e-9);
            }
        }
    }
}

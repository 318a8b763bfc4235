use super::candidates::Candidates;
use super::cost::{ArmKind, CostModel};
use super::BanditState;

/// A distribution over the two arm kinds, indexed by [`ArmKind::index`].
pub type Advice = [f64; 2];

/// `p_i ∝ exp(−w_i / temp)` over the entries where `available` holds.
pub fn softmax(weights: &[f64; 2], available: [bool; 2], temp: f64) -> Advice {
    let best = (0..2)
        .filter(|&i| available[i])
        .map(|i| weights[i])
        .fold(f64::INFINITY, f64::min);
    let mut p = [0.0; 2];
    for i in 0..2 {
        if available[i] {
            p[i] = (-(weights[i] - best) / temp).exp();
        }
    }
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for x in &mut p {
            *x /= total;
        }
    }
    p
}

/// Smallest probability softmax can give one of `n` arms whose weights lie
/// in `[0, 1]`.
pub fn softmax_floor(n: usize, temp: f64) -> f64 {
    1.0 / (1.0 + (n.max(1) - 1) as f64 * (1.0 / temp).exp())
}

/// Advice from each arm's worst-case loss; incomparable answers are ignored.
pub fn pessimistic_advice(c: &Candidates, cost: &CostModel, temp: f64) -> Advice {
    let mut w = [0.0; 2];
    let mut available = [false; 2];
    if let Some((_, est)) = &c.mem {
        w[0] = cost.loss(ArmKind::Membership, est.pool, est.worst_pool());
        available[0] = cost.allows(ArmKind::Membership);
    }
    if let Some((_, est)) = &c.pref {
        w[1] = cost.loss(ArmKind::Preference, est.pool, est.worst_pool());
        available[1] = cost.allows(ArmKind::Preference);
    }
    softmax(&w, available, temp)
}

/// Advice from the running average loss of each arm kind; kinds never pulled
/// count as loss 0.
pub fn historical_advice(state: &BanditState, available: [bool; 2], temp: f64) -> Advice {
    let w = [
        state.average_loss(ArmKind::Membership),
        state.average_loss(ArmKind::Preference),
    ];
    softmax(&w, available, temp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_examples() {
        let p = softmax(&[0.5, 0.9], [true, true], 1.0);
        assert!((p[0] - 0.599).abs() < 1e-3);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        assert_eq!(softmax(&[0.3, 0.3], [true, true], 0.2), [0.5, 0.5]);
        let sharp = softmax(&[0.1, 0.2], [true, true], 1e-4);
        assert!(sharp[0] > 1.0 - 1e-12);
        assert_eq!(softmax(&[0.9, 0.1], [true, false], 0.2), [1.0, 0.0]);
    }

    #[test]
    fn historical_prefers_lower_average() {
        let mut s = BanditState::new(0.5);
        assert_eq!(historical_advice(&s, [true, true], 0.2), [0.5, 0.5]);
        for _ in 0..10 {
            s.record(ArmKind::Preference, 1.0);
            s.record(ArmKind::Membership, 0.5);
        }
        let p = historical_advice(&s, [true, true], 0.2);
        assert!(p[0] > p[1]);
    }

    #[test]
    fn unproductive_preferences_drive_membership_to_the_cap() {
        let mut s = BanditState::new(0.5);
        s.record(ArmKind::Membership, 0.0);
        for _ in 0..100 {
            s.record(ArmKind::Preference, 1.0);
        }
        let p = historical_advice(&s, [true, true], 0.2);
        let cap = 1.0 - softmax_floor(2, 0.2);
        assert!((p[0] - cap).abs() < 1e-9);
    }
}

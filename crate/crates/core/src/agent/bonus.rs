use alloc::vec::Vec;

use crate::belief::Belief;
use crate::error::Error;
use crate::math::sqrt;
use crate::mdp::TabularMdp;

/// Exploration bonus added to the mean reward.
///
/// Count-based bonuses use `max(n, 1)` so an unvisited pair gets the same
/// (maximal) bonus as a pair visited once. Terminal states get no bonus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BonusStrategy {
    None,
    /// `β_R σ_R + β_P sqrt(Σ σ²_P)`.
    Variance { beta_r: f64, beta_p: f64 },
    /// `β / n`.
    InverseCount { beta: f64 },
    /// `β / sqrt(n)`.
    InverseSqrtCount { beta: f64 },
}

impl BonusStrategy {
    pub fn validate(&self) -> Result<(), Error> {
        let coefficients: &[f64] = match self {
            BonusStrategy::None => &[],
            BonusStrategy::Variance { beta_r, beta_p } => &[*beta_r, *beta_p],
            BonusStrategy::InverseCount { beta } | BonusStrategy::InverseSqrtCount { beta } => &[*beta],
        };
        match coefficients.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            Some(c) => Err(Error::InvalidParameter(alloc::format!("bonus coefficient {c} must be finite and >= 0"))),
            None => Ok(()),
        }
    }

    pub fn bonus<B: Belief + ?Sized>(&self, belief: &B, state: usize, action: usize) -> f64 {
        if belief.is_terminal(state) {
            return 0.0;
        }
        match *self {
            BonusStrategy::None => 0.0,
            BonusStrategy::Variance { beta_r, beta_p } => {
                let mut b = 0.0;
                if beta_r != 0.0 {
                    b += beta_r * belief.reward_stddev(state, action);
                }
                if beta_p != 0.0 {
                    b += beta_p * sqrt(belief.transition_variance_sum(state, action));
                }
                b
            }
            BonusStrategy::InverseCount { beta } => beta / belief.visit_count(state, action).max(1) as f64,
            BonusStrategy::InverseSqrtCount { beta } => beta / sqrt(belief.visit_count(state, action).max(1) as f64),
        }
    }
}

/// `R̃_b(s, a) = R_b(s, a) + bonus(s, a)`.
pub fn internal_reward<B: Belief + ?Sized>(bonus: &BonusStrategy, belief: &B, state: usize, action: usize) -> f64 {
    belief.mean_reward(state, action) + bonus.bonus(belief, state, action)
}

/// The belief's mean MDP with internal rewards.
pub fn internal_reward_mdp<B: Belief + ?Sized>(bonus: &BonusStrategy, belief: &B) -> Result<TabularMdp, Error> {
    let mean = belief.mean_mdp()?;
    if *bonus == BonusStrategy::None {
        return Ok(mean);
    }
    let a_count = mean.num_actions();
    let rewards: Vec<f64> = mean
        .rewards()
        .iter()
        .enumerate()
        .map(|(i, r)| r + bonus.bonus(belief, i / a_count, i % a_count))
        .collect();
    mean.with_rewards(rewards)
}

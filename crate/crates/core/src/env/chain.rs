//! The five-node Chain.
//!
//! Action A advances (and pays the big reward at the last node), action B
//! resets to the first node with the small reward. With probability `slip`
//! the outcomes of the two actions are swapped. Nodes are zero-based here.

use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::error::Error;
use crate::mdp::{MdpBuilder, TabularMdp};

pub const ACTION_A: usize = 0;
pub const ACTION_B: usize = 1;

/// Deterministic result of one action before slipping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub next_state: usize,
    pub reward: f64,
}

/// Chain parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub num_states: usize,
    pub slip: f64,
    pub reward_big: f64,
    pub reward_small: f64,
}

impl Default for ChainSpec {
    fn default() -> Self {
        Self { num_states: 5, slip: 0.2, reward_big: 10.0, reward_small: 2.0 }
    }
}

impl ChainSpec {
    pub const NUM_ACTIONS: usize = 2;

    /// Outcome of `action` at `state` when it does not slip.
    pub fn intended(&self, state: usize, action: usize) -> Outcome {
        let last = self.num_states - 1;
        match action {
            ACTION_A if state == last => Outcome { next_state: last, reward: self.reward_big },
            ACTION_A => Outcome { next_state: state + 1, reward: 0.0 },
            _ => Outcome { next_state: 0, reward: self.reward_small },
        }
    }

    /// Outcome of `action` at `state` when it slips.
    pub fn slipped(&self, state: usize, action: usize) -> Outcome {
        self.intended(state, 1 - action)
    }

    /// Reward as a function of the transition; the chain's reward only depends
    /// on the outcome that occurred.
    pub fn outcome_reward(&self, state: usize, next_state: usize) -> f64 {
        let last = self.num_states - 1;
        if next_state == 0 {
            self.reward_small
        } else if state == last && next_state == last {
            self.reward_big
        } else {
            0.0
        }
    }

    /// Checks that every `(state, action)` lets an observer tell a slip from a
    /// non-slip, so that Beta updates on the slip probability are exact.
    pub fn check_slip_observable(&self) -> Result<(), Error> {
        for s in 0..self.num_states {
            for a in 0..Self::NUM_ACTIONS {
                let (i, l) = (self.intended(s, a), self.slipped(s, a));
                if i.next_state == l.next_state {
                    return Err(Error::InvalidModel(alloc::format!(
                        "slip at ({s},{a}) is indistinguishable from the intended outcome"
                    )));
                }
                for o in [i, l] {
                    if self.outcome_reward(s, o.next_state) != o.reward {
                        return Err(Error::InvalidModel(alloc::format!(
                            "outcome reward at ({s},{a}) is not a function of the next state"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Chain MDP with per-action slip probabilities (`slip_by_action[a]`).
    pub fn mdp_with_slips(&self, slip_by_action: [f64; 2], discount: f64) -> Result<TabularMdp, Error> {
        let mut b = MdpBuilder::new(self.num_states, Self::NUM_ACTIONS, discount);
        for s in 0..self.num_states {
            for a in 0..Self::NUM_ACTIONS {
                let w = slip_by_action[a];
                let (i, l) = (self.intended(s, a), self.slipped(s, a));
                b.set_row(s, a, (1.0 - w) * i.reward + w * l.reward, &[(i.next_state, 1.0 - w), (l.next_state, w)]);
            }
        }
        b.build()
    }

    /// The true MDP.
    pub fn true_mdp(&self, discount: f64) -> Result<TabularMdp, Error> {
        self.mdp_with_slips([self.slip; 2], discount)
    }

    /// Samples one step. Returns the outcome and whether it slipped.
    pub fn step<R: RngCore + ?Sized>(&self, state: usize, action: usize, rng: &mut R) -> (Outcome, bool) {
        let slipped = rng.random::<f64>() < self.slip;
        let outcome = if slipped { self.slipped(state, action) } else { self.intended(state, action) };
        (outcome, slipped)
    }
}

/// A running Chain; one continuous interaction with no resets.
#[derive(Debug, Clone)]
pub struct ChainEnv {
    pub spec: ChainSpec,
    state: usize,
}

impl ChainEnv {
    pub fn new(spec: ChainSpec) -> Self {
        Self { spec, state: 0 }
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn step<R: RngCore + ?Sized>(&mut self, action: usize, rng: &mut R) -> Outcome {
        let (outcome, _) = self.spec.step(self.state, action, rng);
        self.state = outcome.next_state;
        outcome
    }
}

/// Stationary distribution over nodes of the always-A policy, by power
/// iteration on the true chain.
pub fn always_a_stationary(spec: &ChainSpec) -> Vec<f64> {
    let n = spec.num_states;
    let mut dist = alloc::vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut next = alloc::vec![0.0; n];
        for s in 0..n {
            next[spec.intended(s, ACTION_A).next_state] += dist[s] * (1.0 - spec.slip);
            next[spec.slipped(s, ACTION_A).next_state] += dist[s] * spec.slip;
        }
        dist = next;
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{greedy_policy, value_iteration, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};

    #[test]
    fn documented_outcomes() {
        let c = ChainSpec::default();
        assert_eq!(c.intended(4, ACTION_A), Outcome { next_state: 4, reward: 10.0 });
        assert_eq!(c.intended(2, ACTION_B), Outcome { next_state: 0, reward: 2.0 });
        assert_eq!(c.slipped(2, ACTION_B), Outcome { next_state: 3, reward: 0.0 });
        c.check_slip_observable().unwrap();
    }

    #[test]
    fn true_mdp_prefers_a_everywhere() {
        let mdp = ChainSpec::default().true_mdp(0.95).unwrap();
        let vf = value_iteration(&mdp, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(greedy_policy(&vf).action, alloc::vec![ACTION_A; 5]);
    }

    #[test]
    fn stationary_matches_closed_form() {
        let d = always_a_stationary(&ChainSpec::default());
        for (x, y) in d.iter().zip([0.2, 0.16, 0.128, 0.1024, 0.4096]) {
            assert!((x - y).abs() < 1e-12, "{d:?}");
        }
    }
}

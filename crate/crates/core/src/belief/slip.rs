use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use rand_distr::{Beta, Distribution};

use super::{check_pair, Belief, VisitCounts};
use crate::env::chain::ChainSpec;
use crate::error::Error;
use crate::mdp::{TabularMdp, Transition};

/// How slip probabilities are shared across the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlipTying {
    /// One slip probability for every state–action pair.
    Tied,
    /// One slip probability per action, shared across states.
    SemiTied,
}

/// Beta posterior over the Chain's slip probability with the structure known.
///
/// Each Beta is stored as pseudo-counts `(slip, stay)`, so the mean slip
/// probability is `slip / (slip + stay)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlipBelief {
    chain: ChainSpec,
    tying: SlipTying,
    params: Vec<(f64, f64)>,
    counts: VisitCounts,
    discount: f64,
}

impl SlipBelief {
    pub fn new(chain: ChainSpec, tying: SlipTying, slip: f64, stay: f64, discount: f64) -> Result<Self, Error> {
        chain.check_slip_observable()?;
        if !(slip > 0.0 && stay > 0.0 && slip.is_finite() && stay.is_finite()) {
            return Err(Error::InvalidParameter(format!("Beta({slip}, {stay}) is not a valid prior")));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidParameter(format!("discount {discount} outside [0, 1)")));
        }
        let groups = match tying {
            SlipTying::Tied => 1,
            SlipTying::SemiTied => ChainSpec::NUM_ACTIONS,
        };
        Ok(Self {
            chain,
            tying,
            params: vec![(slip, stay); groups],
            counts: VisitCounts::new(chain.num_states, ChainSpec::NUM_ACTIONS),
            discount,
        })
    }

    pub fn tying(&self) -> SlipTying {
        self.tying
    }

    fn group(&self, action: usize) -> usize {
        match self.tying {
            SlipTying::Tied => 0,
            SlipTying::SemiTied => action,
        }
    }

    /// Beta pseudo-counts `(slip, stay)` governing `action`.
    pub fn params(&self, action: usize) -> (f64, f64) {
        self.params[self.group(action)]
    }

    /// Posterior mean slip probability for `action`.
    pub fn mean_slip(&self, action: usize) -> f64 {
        let (a, b) = self.params(action);
        a / (a + b)
    }

    /// Posterior variance of the slip probability for `action`.
    pub fn slip_variance(&self, action: usize) -> f64 {
        let (a, b) = self.params(action);
        a * b / ((a + b) * (a + b) * (a + b + 1.0))
    }
}

impl Belief for SlipBelief {
    fn num_states(&self) -> usize {
        self.chain.num_states
    }

    fn num_actions(&self) -> usize {
        ChainSpec::NUM_ACTIONS
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn mean_reward(&self, state: usize, action: usize) -> f64 {
        let w = self.mean_slip(action);
        (1.0 - w) * self.chain.intended(state, action).reward + w * self.chain.slipped(state, action).reward
    }

    fn mean_transition(&self, state: usize, action: usize) -> Vec<f64> {
        let w = self.mean_slip(action);
        let mut row = vec![0.0; self.chain.num_states];
        row[self.chain.intended(state, action).next_state] += 1.0 - w;
        row[self.chain.slipped(state, action).next_state] += w;
        row
    }

    fn transition_variance_sum(&self, _state: usize, action: usize) -> f64 {
        // P(intended) = 1 − w and P(slipped) = w both carry Var(w).
        2.0 * self.slip_variance(action)
    }

    fn visit_count(&self, state: usize, action: usize) -> u64 {
        self.counts.get(state, action)
    }

    // The next state alone identifies a slip; the reward follows from it.
    fn update(&mut self, t: &Transition) -> Result<(), Error> {
        check_pair(self.chain.num_states, ChainSpec::NUM_ACTIONS, t)?;
        let intended = self.chain.intended(t.state, t.action);
        let slipped = self.chain.slipped(t.state, t.action);
        let group = self.group(t.action);
        if t.next_state == intended.next_state {
            self.params[group].1 += 1.0;
        } else if t.next_state == slipped.next_state {
            self.params[group].0 += 1.0;
        } else {
            return Err(Error::InconsistentObservation(format!(
                "({}, {}) -> {} is neither the intended nor the slipped chain outcome",
                t.state, t.action, t.next_state
            )));
        }
        self.counts.increment(t.state, t.action);
        Ok(())
    }

    fn sample_mdp(&self, rng: &mut dyn RngCore) -> Result<TabularMdp, Error> {
        let mut draws = [0.0; 2];
        for (g, &(a, b)) in self.params.iter().enumerate() {
            let beta = Beta::new(a, b).map_err(|e| Error::InvalidParameter(format!("{e}")))?;
            draws[g] = beta.sample(rng);
        }
        let slips = match self.tying {
            SlipTying::Tied => [draws[0]; 2],
            SlipTying::SemiTied => draws,
        };
        self.chain.mdp_with_slips(slips, self.discount)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::chain::{ACTION_A, ACTION_B};

    fn tied(a: f64, b: f64) -> SlipBelief {
        SlipBelief::new(ChainSpec::default(), SlipTying::Tied, a, b, 0.95).unwrap()
    }

    #[test]
    fn non_slip_observation() {
        let mut b = tied(1.0, 1.0);
        let o = ChainSpec::default().intended(0, ACTION_A);
        b.update(&Transition { state: 0, action: ACTION_A, reward: o.reward, next_state: o.next_state }).unwrap();
        assert_eq!(b.params(ACTION_A), (1.0, 2.0));
        assert!((b.mean_slip(ACTION_A) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn slip_observation_semi_tied_only_touches_its_action() {
        let chain = ChainSpec::default();
        let mut b = SlipBelief::new(chain, SlipTying::SemiTied, 1.0, 1.0, 0.95).unwrap();
        let o = chain.slipped(3, ACTION_B);
        b.update(&Transition { state: 3, action: ACTION_B, reward: o.reward, next_state: o.next_state }).unwrap();
        assert_eq!(b.params(ACTION_B), (2.0, 1.0));
        assert_eq!(b.params(ACTION_A), (1.0, 1.0));
    }

    #[test]
    fn rejects_impossible_outcome() {
        let mut b = tied(1.0, 1.0);
        let err = b.update(&Transition { state: 0, action: ACTION_A, reward: 0.0, next_state: 3 });
        assert!(matches!(err, Err(Error::InconsistentObservation(_))));
    }

    #[test]
    fn prior_mean_mdp_is_true_chain() {
        let chain = ChainSpec::default();
        let mean = tied(1.0, 4.0).mean_mdp().unwrap();
        let truth = chain.true_mdp(0.95).unwrap();
        for s in 0..5 {
            for a in 0..2 {
                for n in 0..5 {
                    assert!((mean.transition(s, a, n) - truth.transition(s, a, n)).abs() < 1e-15);
                }
                assert!((mean.reward(s, a) - truth.reward(s, a)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variance_is_twice_beta_variance() {
        let b = tied(2.0, 3.0);
        let var = 6.0 / (25.0 * 6.0);
        assert!((b.transition_variance_sum(1, ACTION_A) - 2.0 * var).abs() < 1e-15);
    }
}

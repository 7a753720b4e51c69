use alloc::vec::Vec;

use rand::RngCore;

use super::{check_pair, Belief, VisitCounts};
use crate::error::Error;
use crate::mdp::{TabularMdp, Transition};

/// A posterior concentrated on a single known MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMassBelief {
    mdp: TabularMdp,
    counts: VisitCounts,
}

impl PointMassBelief {
    pub fn new(mdp: TabularMdp) -> Self {
        let counts = VisitCounts::new(mdp.num_states(), mdp.num_actions());
        Self { mdp, counts }
    }

    pub fn mdp(&self) -> &TabularMdp {
        &self.mdp
    }
}

impl Belief for PointMassBelief {
    fn num_states(&self) -> usize {
        self.mdp.num_states()
    }

    fn num_actions(&self) -> usize {
        self.mdp.num_actions()
    }

    fn discount(&self) -> f64 {
        self.mdp.discount()
    }

    fn is_terminal(&self, state: usize) -> bool {
        self.mdp.is_terminal(state)
    }

    fn mean_reward(&self, state: usize, action: usize) -> f64 {
        self.mdp.reward(state, action)
    }

    fn mean_transition(&self, state: usize, action: usize) -> Vec<f64> {
        self.mdp.dense_row(state, action)
    }

    fn transition_variance_sum(&self, _state: usize, _action: usize) -> f64 {
        0.0
    }

    fn visit_count(&self, state: usize, action: usize) -> u64 {
        self.counts.get(state, action)
    }

    fn update(&mut self, t: &Transition) -> Result<(), Error> {
        check_pair(self.mdp.num_states(), self.mdp.num_actions(), t)?;
        self.counts.increment(t.state, t.action);
        Ok(())
    }

    fn sample_mdp(&self, _rng: &mut dyn RngCore) -> Result<TabularMdp, Error> {
        Ok(self.mdp.clone())
    }

    fn mean_mdp(&self) -> Result<TabularMdp, Error> {
        Ok(self.mdp.clone())
    }
}

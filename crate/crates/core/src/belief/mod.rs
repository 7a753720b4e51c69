//! Posterior distributions over MDPs.
//!
//! A [`Belief`] answers the queries the planners need: the mean model, the
//! posterior variance of the model parameters, visit counts, exact posterior
//! samples, and Bayes updates from observed transitions.

mod dirichlet;
mod point;
mod slip;
mod wumpus;

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

pub use dirichlet::DirichletBelief;
pub use point::PointMassBelief;
pub use slip::{SlipBelief, SlipTying};
pub use wumpus::{WumpusBelief, WumpusCellStats};

use crate::error::Error;
use crate::mdp::{MdpBuilder, TabularMdp, Transition};

pub trait Belief {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Discount used for the mean MDP and for samples.
    fn discount(&self) -> f64;

    fn is_terminal(&self, _state: usize) -> bool {
        false
    }

    /// `R_b(s, a)`.
    fn mean_reward(&self, state: usize, action: usize) -> f64;

    /// `P_b(· | s, a)` as a dense length-`S` vector.
    fn mean_transition(&self, state: usize, action: usize) -> Vec<f64>;

    /// Posterior standard deviation of the expected reward parameter.
    fn reward_stddev(&self, _state: usize, _action: usize) -> f64 {
        0.0
    }

    /// `Σ_{s'} Var_b[P(s'|s,a)]`.
    fn transition_variance_sum(&self, state: usize, action: usize) -> f64;

    fn visit_count(&self, state: usize, action: usize) -> u64;

    /// Conditions on the percepts of the initial state. Most beliefs learn
    /// nothing from it.
    fn observe_initial(&mut self, _state: usize) -> Result<(), Error> {
        Ok(())
    }

    /// Replaces the belief with its Bayes posterior after `transition`.
    fn update(&mut self, transition: &Transition) -> Result<(), Error>;

    /// One exact draw from the posterior.
    fn sample_mdp(&self, rng: &mut dyn RngCore) -> Result<TabularMdp, Error>;

    /// The mean MDP `(R_b, P_b, γ)`.
    fn mean_mdp(&self) -> Result<TabularMdp, Error> {
        let (s_count, a_count) = (self.num_states(), self.num_actions());
        let mut b = MdpBuilder::new(s_count, a_count, self.discount());
        let mut row = Vec::with_capacity(s_count);
        for s in 0..s_count {
            if self.is_terminal(s) {
                b.set_terminal(s);
                continue;
            }
            for a in 0..a_count {
                row.clear();
                row.extend(self.mean_transition(s, a).into_iter().enumerate().filter(|(_, p)| *p > 0.0));
                b.set_row(s, a, self.mean_reward(s, a), &row);
            }
        }
        b.build()
    }
}

/// Per-`(s, a)` visit counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitCounts {
    num_actions: usize,
    counts: Vec<u64>,
}

impl VisitCounts {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self { num_actions, counts: vec![0; num_states * num_actions] }
    }

    pub fn get(&self, state: usize, action: usize) -> u64 {
        self.counts[state * self.num_actions + action]
    }

    pub fn increment(&mut self, state: usize, action: usize) {
        self.counts[state * self.num_actions + action] += 1;
    }
}

/// `Σ p(1 − p)` over a distribution: the variance sum of a belief whose
/// hypotheses are all deterministic.
pub fn bernoulli_variance_sum(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().map(|p| p * (1.0 - p)).sum::<f64>().max(0.0)
}

pub(crate) fn check_pair(num_states: usize, num_actions: usize, t: &Transition) -> Result<(), Error> {
    if t.state >= num_states || t.next_state >= num_states || t.action >= num_actions {
        return Err(Error::InvalidParameter(alloc::format!(
            "transition ({}, {}, {}) out of range for S={num_states}, A={num_actions}",
            t.state,
            t.action,
            t.next_state
        )));
    }
    Ok(())
}

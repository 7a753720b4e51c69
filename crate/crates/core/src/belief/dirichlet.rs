use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use rand_distr::{Distribution, Gamma};

use super::{check_pair, Belief, VisitCounts};
use crate::error::Error;
use crate::mdp::{MdpBuilder, TabularMdp, Transition};

/// Independent Dirichlet posterior over each transition row with a known
/// reward function `r(s, a, s')`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletBelief {
    num_states: usize,
    num_actions: usize,
    alpha: Vec<f64>,
    alpha_sum: Vec<f64>,
    outcome_reward: Vec<f64>,
    counts: VisitCounts,
    discount: f64,
}

impl DirichletBelief {
    /// Symmetric prior with `concentration` on every next state.
    /// `outcome_reward` is the dense `S×A×S` reward of each transition.
    pub fn symmetric(
        num_states: usize,
        num_actions: usize,
        concentration: f64,
        outcome_reward: Vec<f64>,
        discount: f64,
    ) -> Result<Self, Error> {
        let alpha = vec![concentration; num_states * num_actions * num_states];
        Self::new(num_states, num_actions, alpha, outcome_reward, discount)
    }

    pub fn new(
        num_states: usize,
        num_actions: usize,
        alpha: Vec<f64>,
        outcome_reward: Vec<f64>,
        discount: f64,
    ) -> Result<Self, Error> {
        let n = num_states * num_actions * num_states;
        if num_states == 0 || num_actions == 0 || alpha.len() != n || outcome_reward.len() != n {
            return Err(Error::InvalidParameter(format!("Dirichlet tables must have S*A*S = {n} entries")));
        }
        if let Some(x) = alpha.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(format!("Dirichlet concentration {x} must be positive")));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidParameter(format!("discount {discount} outside [0, 1)")));
        }
        let alpha_sum = alpha.chunks(num_states).map(|row| row.iter().sum()).collect();
        Ok(Self {
            num_states,
            num_actions,
            alpha,
            alpha_sum,
            outcome_reward,
            counts: VisitCounts::new(num_states, num_actions),
            discount,
        })
    }

    /// Reward depending only on `(s, a)`: `r(s, a, s') = reward[s * A + a]`.
    pub fn expand_pair_rewards(num_states: usize, num_actions: usize, reward: &[f64]) -> Vec<f64> {
        reward.iter().flat_map(|&r| core::iter::repeat_n(r, num_states)).take(num_states * num_actions * num_states).collect()
    }

    pub fn alpha(&self, state: usize, action: usize) -> &[f64] {
        let base = (state * self.num_actions + action) * self.num_states;
        &self.alpha[base..base + self.num_states]
    }

    fn outcome_rewards(&self, state: usize, action: usize) -> &[f64] {
        let base = (state * self.num_actions + action) * self.num_states;
        &self.outcome_reward[base..base + self.num_states]
    }

    fn pair_sum(&self, state: usize, action: usize) -> f64 {
        self.alpha_sum[state * self.num_actions + action]
    }
}

impl Belief for DirichletBelief {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn mean_reward(&self, state: usize, action: usize) -> f64 {
        let total = self.pair_sum(state, action);
        self.alpha(state, action).iter().zip(self.outcome_rewards(state, action)).map(|(a, r)| a / total * r).sum()
    }

    fn mean_transition(&self, state: usize, action: usize) -> Vec<f64> {
        let total = self.pair_sum(state, action);
        self.alpha(state, action).iter().map(|a| a / total).collect()
    }

    fn transition_variance_sum(&self, state: usize, action: usize) -> f64 {
        let total = self.pair_sum(state, action);
        let spread: f64 = self.alpha(state, action).iter().map(|a| (a / total) * (1.0 - a / total)).sum();
        spread / (total + 1.0)
    }

    fn visit_count(&self, state: usize, action: usize) -> u64 {
        self.counts.get(state, action)
    }

    fn update(&mut self, t: &Transition) -> Result<(), Error> {
        check_pair(self.num_states, self.num_actions, t)?;
        let pair = t.state * self.num_actions + t.action;
        self.alpha[pair * self.num_states + t.next_state] += 1.0;
        self.alpha_sum[pair] += 1.0;
        self.counts.increment(t.state, t.action);
        Ok(())
    }

    fn sample_mdp(&self, rng: &mut dyn RngCore) -> Result<TabularMdp, Error> {
        let mut b = MdpBuilder::new(self.num_states, self.num_actions, self.discount);
        let mut probs = vec![0.0; self.num_states];
        let mut row = Vec::with_capacity(self.num_states);
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                let alpha = self.alpha(s, a);
                let mut total = 0.0;
                for (p, &k) in probs.iter_mut().zip(alpha) {
                    let g = Gamma::new(k, 1.0).map_err(|e| Error::InvalidParameter(format!("{e}")))?;
                    *p = g.sample(rng);
                    total += *p;
                }
                if !(total > 0.0) {
                    // Every draw underflowed; fall back to the heaviest outcome.
                    let top = (0..alpha.len()).max_by(|&i, &j| alpha[i].total_cmp(&alpha[j])).unwrap_or(0);
                    probs.iter_mut().enumerate().for_each(|(i, p)| *p = if i == top { 1.0 } else { 0.0 });
                    total = 1.0;
                }
                row.clear();
                row.extend(probs.iter().enumerate().map(|(n, p)| (n, p / total)));
                let reward = row.iter().zip(self.outcome_rewards(s, a)).map(|((_, p), r)| p * r).sum();
                b.set_row(s, a, reward, &row);
            }
        }
        b.build()
    }
}

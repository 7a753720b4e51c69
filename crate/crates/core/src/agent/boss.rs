use alloc::vec::Vec;

use rand::RngCore;

use super::Agent;
use crate::belief::Belief;
use crate::error::Error;
use crate::mdp::{value_iteration, TabularMdp, Transition, ValueFunction};
use super::PlannerConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BossConfig {
    /// Number of posterior samples merged per plan.
    pub samples: usize,
    /// Resample when some pair's visit count first reaches this value.
    pub knownness: u64,
    pub planner: PlannerConfig,
}

impl Default for BossConfig {
    fn default() -> Self {
        Self { samples: 20, knownness: 1, planner: PlannerConfig::default() }
    }
}

/// Best-of-sampled-set: plans in the MDP whose action set is the union of the
/// action sets of `K` posterior samples and executes the primitive action of
/// the greedy merged choice.
#[derive(Debug, Clone)]
pub struct BossAgent<B> {
    belief: B,
    config: BossConfig,
    merged: Option<TabularMdp>,
    values: Option<ValueFunction>,
    stale: bool,
    planning_events: usize,
}

impl<B: Belief> BossAgent<B> {
    pub fn new(belief: B, config: BossConfig) -> Result<Self, Error> {
        if config.samples == 0 {
            return Err(Error::InvalidParameter("BOSS needs at least one sample".into()));
        }
        Ok(Self { belief, config, merged: None, values: None, stale: true, planning_events: 0 })
    }

    pub fn belief(&self) -> &B {
        &self.belief
    }

    /// The merged MDP and its value function from the latest plan.
    pub fn plan_state(&self) -> Option<(&TabularMdp, &ValueFunction)> {
        self.merged.as_ref().zip(self.values.as_ref())
    }

    /// Draws `K` fresh samples and plans in their merged MDP.
    pub fn resample(&mut self, rng: &mut dyn RngCore) -> Result<Vec<TabularMdp>, Error> {
        let samples = (0..self.config.samples).map(|_| self.belief.sample_mdp(rng)).collect::<Result<Vec<_>, _>>()?;
        let merged = TabularMdp::merge(&samples)?;
        let vf = value_iteration(&merged, self.config.planner.tolerance, self.config.planner.max_iters)?;
        self.merged = Some(merged);
        self.values = Some(vf);
        self.planning_events += 1;
        self.stale = false;
        Ok(samples)
    }
}

impl<B: Belief> Agent for BossAgent<B> {
    fn begin(&mut self, state: usize) -> Result<(), Error> {
        self.belief.observe_initial(state)?;
        self.stale = true;
        Ok(())
    }

    fn act(&mut self, state: usize, rng: &mut dyn RngCore) -> Result<usize, Error> {
        if self.stale || self.values.is_none() {
            self.resample(rng)?;
        }
        let merged_action = self.values.as_ref().expect("planned above").greedy_action(state);
        Ok(merged_action % self.belief.num_actions())
    }

    fn observe(&mut self, t: &Transition) -> Result<(), Error> {
        self.belief.update(t)?;
        if self.belief.visit_count(t.state, t.action) == self.config.knownness {
            self.stale = true;
        }
        Ok(())
    }

    fn planning_events(&self) -> usize {
        self.planning_events
    }
}

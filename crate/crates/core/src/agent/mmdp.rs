use alloc::format;
use alloc::vec::Vec;

use rand::RngCore;

use super::{internal_reward_mdp, Agent, BonusStrategy};
use crate::belief::Belief;
use crate::error::Error;
use crate::mdp::{value_iteration_from, Transition, ValueFunction, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, max_iters: DEFAULT_MAX_ITERS }
    }
}

/// Per-pair visit thresholds after which a pair counts as known.
/// `u64::MAX` never becomes known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownThresholds {
    num_actions: usize,
    thresholds: Vec<u64>,
}

impl KnownThresholds {
    pub fn new(num_states: usize, num_actions: usize, thresholds: Vec<u64>) -> Result<Self, Error> {
        if thresholds.len() != num_states * num_actions {
            return Err(Error::InvalidParameter(format!(
                "knownness table has {} entries, expected {}",
                thresholds.len(),
                num_states * num_actions
            )));
        }
        Ok(Self { num_actions, thresholds })
    }

    pub fn uniform(num_states: usize, num_actions: usize, threshold: u64) -> Self {
        Self { num_actions, thresholds: alloc::vec![threshold; num_states * num_actions] }
    }

    pub fn get(&self, state: usize, action: usize) -> u64 {
        self.thresholds[state * self.num_actions + action]
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplanSchedule {
    /// Replan after every observation.
    EveryStep,
    /// Plan once, then only when some pair's visit count first reaches its threshold.
    KnownGated(KnownThresholds),
}

/// Greedy agent on the internal-reward mean MDP of its belief.
///
/// With [`BonusStrategy::None`] and [`ReplanSchedule::EveryStep`] this is the
/// plain mean-MDP agent.
#[derive(Debug, Clone)]
pub struct MeanMdpAgent<B> {
    belief: B,
    bonus: BonusStrategy,
    planner: PlannerConfig,
    schedule: ReplanSchedule,
    known: Vec<bool>,
    values: Option<ValueFunction>,
    stale: bool,
    planning_events: usize,
}

impl<B: Belief> MeanMdpAgent<B> {
    pub fn new(belief: B, bonus: BonusStrategy, planner: PlannerConfig, schedule: ReplanSchedule) -> Result<Self, Error> {
        bonus.validate()?;
        let pairs = belief.num_states() * belief.num_actions();
        let known = match &schedule {
            ReplanSchedule::EveryStep => alloc::vec![false; pairs],
            ReplanSchedule::KnownGated(c) => {
                if c.len() != pairs {
                    return Err(Error::InvalidParameter(format!("knownness table has {} entries, expected {pairs}", c.len())));
                }
                let a_count = belief.num_actions();
                (0..pairs).map(|i| belief.visit_count(i / a_count, i % a_count) >= c.get(i / a_count, i % a_count)).collect()
            }
        };
        Ok(Self { belief, bonus, planner, schedule, known, values: None, stale: true, planning_events: 0 })
    }

    pub fn belief(&self) -> &B {
        &self.belief
    }

    pub fn bonus(&self) -> &BonusStrategy {
        &self.bonus
    }

    /// The value function currently acted on, if any.
    pub fn values(&self) -> Option<&ValueFunction> {
        self.values.as_ref()
    }

    /// Recomputes `Q̃_b` now, warm-starting from the previous solution.
    pub fn plan(&mut self) -> Result<&ValueFunction, Error> {
        let mdp = internal_reward_mdp(&self.bonus, &self.belief)?;
        let vf = match &self.values {
            Some(prev) => value_iteration_from(&mdp, &prev.values, self.planner.tolerance, self.planner.max_iters)?,
            None => value_iteration_from(
                &mdp,
                &alloc::vec![0.0; mdp.num_states()],
                self.planner.tolerance,
                self.planner.max_iters,
            )?,
        };
        self.planning_events += 1;
        self.stale = false;
        Ok(self.values.insert(vf))
    }
}

impl<B: Belief> Agent for MeanMdpAgent<B> {
    fn begin(&mut self, state: usize) -> Result<(), Error> {
        self.belief.observe_initial(state)?;
        self.stale = true;
        Ok(())
    }

    fn act(&mut self, state: usize, _rng: &mut dyn RngCore) -> Result<usize, Error> {
        if self.stale || self.values.is_none() {
            self.plan()?;
        }
        Ok(self.values.as_ref().expect("planned above").greedy_action(state))
    }

    fn observe(&mut self, t: &Transition) -> Result<(), Error> {
        self.belief.update(t)?;
        match &self.schedule {
            ReplanSchedule::EveryStep => self.stale = true,
            ReplanSchedule::KnownGated(c) => {
                let i = t.state * self.belief.num_actions() + t.action;
                if !self.known[i] && self.belief.visit_count(t.state, t.action) >= c.get(t.state, t.action) {
                    self.known[i] = true;
                    self.stale = true;
                }
            }
        }
        Ok(())
    }

    fn planning_events(&self) -> usize {
        self.planning_events
    }
}

//! Act–observe–update loops.
//!
//! [`MeanMdpAgent`] plans in the mean MDP of its belief with an internal reward
//! `R_b + bonus`; with [`ReplanSchedule::KnownGated`] it only replans when a
//! state–action pair first reaches its knownness threshold. [`BossAgent`]
//! plans in the merged MDP of `K` posterior samples.

mod bonus;
mod boss;
mod mmdp;

use rand::RngCore;

pub use bonus::{internal_reward, internal_reward_mdp, BonusStrategy};
pub use boss::{BossAgent, BossConfig};
pub use mmdp::{KnownThresholds, MeanMdpAgent, PlannerConfig, ReplanSchedule};

use crate::error::Error;
use crate::mdp::Transition;

pub trait Agent {
    /// Starts an episode in `state` (conditions the belief on its percepts).
    fn begin(&mut self, state: usize) -> Result<(), Error>;

    /// Chooses an action at `state`, replanning first if the schedule asks for it.
    fn act(&mut self, state: usize, rng: &mut dyn RngCore) -> Result<usize, Error>;

    /// Folds an observed transition into the belief.
    fn observe(&mut self, transition: &Transition) -> Result<(), Error>;

    /// Number of times a value function has been computed.
    fn planning_events(&self) -> usize;
}

//! Drivers for one Chain run or one Wumpus episode.

use alloc::vec::Vec;

use rand::RngCore;

use crate::agent::Agent;
use crate::env::chain::ChainEnv;
use crate::env::wumpus::{WumpusConfig, WumpusEnv};
use crate::error::Error;
use crate::mdp::Transition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub transition: Transition,
}

/// Trajectory and objective return of one run or episode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeRecord {
    /// Empty unless step recording was requested.
    pub steps: Vec<StepRecord>,
    /// Undiscounted sum of objective rewards.
    pub total_reward: f64,
    pub length: usize,
    pub terminated: bool,
    pub planning_events: usize,
}

/// One continuous Chain interaction of `horizon` steps from the first node.
///
/// `env_rng` drives slips only and `agent_rng` drives the agent, so agents that
/// consume randomness see the same slip sequence as agents that do not.
pub fn run_chain(
    agent: &mut dyn Agent,
    env: &mut ChainEnv,
    horizon: usize,
    env_rng: &mut dyn RngCore,
    agent_rng: &mut dyn RngCore,
    record_steps: bool,
) -> Result<EpisodeRecord, Error> {
    let mut record = EpisodeRecord::default();
    agent.begin(env.state())?;
    for t in 0..horizon {
        let state = env.state();
        let action = agent.act(state, agent_rng)?;
        let outcome = env.step(action, env_rng);
        let transition = Transition { state, action, reward: outcome.reward, next_state: outcome.next_state };
        agent.observe(&transition)?;
        record.total_reward += outcome.reward;
        record.length += 1;
        if record_steps {
            record.steps.push(StepRecord { t, transition });
        }
    }
    record.planning_events = agent.planning_events();
    Ok(record)
}

/// One Wumpus episode on a fixed layout, until a terminal state or `cap` steps.
pub fn run_wumpus(
    agent: &mut dyn Agent,
    config: WumpusConfig,
    cap: usize,
    agent_rng: &mut dyn RngCore,
    record_steps: bool,
) -> Result<EpisodeRecord, Error> {
    let mut record = EpisodeRecord::default();
    let mut env = WumpusEnv::new(config);
    let mut state = env.state().index();
    agent.begin(state)?;
    for t in 0..cap {
        let action = agent.act(state, agent_rng)?;
        let step = env.step(action)?;
        let transition = Transition { state, action, reward: step.reward, next_state: step.state };
        agent.observe(&transition)?;
        record.total_reward += step.reward;
        record.length += 1;
        if record_steps {
            record.steps.push(StepRecord { t, transition });
        }
        state = step.state;
        if step.terminal {
            record.terminated = true;
            break;
        }
    }
    record.planning_events = agent.planning_events();
    Ok(record)
}

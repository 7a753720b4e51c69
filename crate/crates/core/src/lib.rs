//! Tabular Bayesian reinforcement learning with posterior-variance exploration
//! bonuses.
//!
//! The crate is `no_std` (with `alloc`). It contains:
//!
//! - [`mdp`]: finite MDPs and exact planning (value iteration, policy evaluation),
//! - [`belief`]: posteriors over MDPs (Dirichlet, tied/semi-tied slip, Hunt the
//!   Wumpus, point mass),
//! - [`agent`]: mean-MDP agents with pluggable reward bonuses, the knownness-gated
//!   variant and a BOSS-style merged-sample planner,
//! - [`env`]: the Chain and Hunt the Wumpus simulators,
//! - [`analysis`]: deviation bounds, optimism bonus and sample-complexity formulas,
//! - [`rollout`]: single-run drivers that tie agents to environments.
//!
//! IO, parallel experiment orchestration and the CLI live in the
//! `varbonus-harness` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agent;
pub mod analysis;
pub mod belief;
pub mod env;
mod error;
mod math;
pub mod mdp;
pub mod rollout;

pub use error::Error;
pub use mdp::{Policy, TabularMdp, Transition, ValueFunction};

//! Ground-truth simulators.

pub mod chain;
pub mod wumpus;

//! Experiment orchestration, file formats and the `varbonus` CLI on top of
//! `varbonus-core`.

pub mod bounds;
pub mod config;
mod error;
pub mod experiment;
pub mod output;
pub mod seed;
pub mod trajectory;

pub use error::HarnessError;

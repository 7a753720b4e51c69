use alloc::string::String;

/// Errors raised by model construction, belief updates and parameter checks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Every hypothesis in a belief factor was ruled out by an observation.
    #[error("belief contradiction: {0}")]
    BeliefContradiction(String),
    /// An observation that the belief's structural assumptions cannot explain.
    #[error("inconsistent observation: {0}")]
    InconsistentObservation(String),
    #[error("action taken in terminal state {0}")]
    TerminalState(usize),
}

use thiserror::Error;

/// Errors produced by the bargaining laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("horizon exhausted: learner already took {steps} of {horizon} steps")]
    HorizonExceeded { steps: usize, horizon: usize },

    #[error("learner has no feedback yet; play the initial strategy at t = 1")]
    NoFeedback,

    #[error("initial condition outside hypothesis: {0}")]
    OutOfHypothesis(String),

    #[error("bin spacing violated in round {round}: {a} and {b} are closer than {min_spacing}")]
    BinSpacing {
        round: usize,
        a: f64,
        b: f64,
        min_spacing: f64,
    },

    #[error("target infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

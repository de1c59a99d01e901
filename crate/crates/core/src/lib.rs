//! Learning and equilibrium tools for alternating-offers bargaining.
//!
//! * [`game`]: the finite-round game, payoffs and brute-force equilibrium queries.
//! * [`ftrl`]: discretized follow-the-regularized-leader learners.
//! * [`dynamics`]: self-play, convergence detection, trajectory prediction and regret.
//! * [`spe`]: stationary subgame-perfect equilibria of the hiring market.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod ftrl;
pub mod game;
pub mod simplex;
pub mod spe;

pub use error::{Error, Result};
pub use game::{
    best_responses, equilibrium_value, feedback_vector, is_pure_ne, play, utility,
    utility_continuous, Agent, FeedbackVector, GameConfig, GridValue, Outcome, Strategy,
    StrategySpace, PAYOFF_TOL,
};
pub use simplex::project_to_simplex;

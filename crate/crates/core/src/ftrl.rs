//! Discretized follow-the-regularized-leader over the pure strategies of the
//! bargaining game.
//!
//! With the ℓ1 regularizer every iterate is pure: the learner maximizes its
//! cumulative payoff minus a penalty of `2/M` for leaving its reference
//! strategy, and ties go to the lexicographically largest strategy. With the
//! ℓ2 regularizer the iterate is the Euclidean projection of
//! `α + M·Σ u` onto the simplex.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{feedback_table, Agent, GameConfig, Strategy, StrategySpace, PAYOFF_TOL};
use crate::simplex::project_to_simplex;

/// Regularizer exponent `p` of the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regularizer {
    L1,
    L2,
}

impl Regularizer {
    pub fn from_exponent(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Regularizer::L1),
            2 => Ok(Regularizer::L2),
            other => Err(invalid(format!(
                "unsupported regularizer exponent {other}; expected 1 or 2"
            ))),
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            Regularizer::L1 => 1,
            Regularizer::L2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub horizon: usize,
    pub learning_rate: f64,
    pub regularizer: Regularizer,
    pub initial: Strategy,
    pub reference: Strategy,
    pub game: GameConfig,
    pub role: Agent,
}

impl LearnerConfig {
    pub fn new(
        role: Agent,
        game: GameConfig,
        horizon: usize,
        learning_rate: f64,
        regularizer: Regularizer,
        initial: Strategy,
        reference: Strategy,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(invalid(format!(
                "learning rate {learning_rate} must be positive and finite"
            )));
        }
        game.check(&initial)?;
        game.check(&reference)?;
        Ok(LearnerConfig {
            horizon,
            learning_rate,
            regularizer,
            initial,
            reference,
            game,
            role,
        })
    }

    /// A warning when an ℓ1 learner's rate is too small for the reference
    /// point to stop mattering (`M ≤ 2D`).
    pub fn rate_warning(&self) -> Option<String> {
        let limit = 2.0 * f64::from(self.game.grid());
        (self.regularizer == Regularizer::L1 && self.learning_rate <= limit).then(|| {
            format!(
                "learning rate {} does not exceed 2D = {limit}; the reference point may dominate",
                self.learning_rate
            )
        })
    }
}

/// A probability distribution over pure strategies, indexed by
/// [`StrategySpace`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub space: StrategySpace,
    weights: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(space: StrategySpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(invalid(format!(
                "mixed strategy has {} weights for {} pure strategies",
                weights.len(),
                space.len()
            )));
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(invalid("weights must be nonnegative and sum to 1"));
        }
        Ok(MixedStrategy { space, weights })
    }

    pub fn pure(space: StrategySpace, s: &Strategy) -> Self {
        let mut weights = vec![0.0; space.len()];
        weights[space.index_of(s)] = 1.0;
        MixedStrategy { space, weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, s: &Strategy) -> f64 {
        self.weights[self.space.index_of(s)]
    }

    /// Pure strategies with positive mass, with their masses.
    pub fn support(&self) -> impl Iterator<Item = (Strategy, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (self.space.strategy(i), w))
    }

    /// The pure strategy carrying (numerically) all the mass, if any.
    pub fn as_pure(&self) -> Option<Strategy> {
        self.weights
            .iter()
            .position(|&w| w >= 1.0 - 1e-12)
            .map(|i| self.space.strategy(i))
    }

    /// Expected value of a payoff table under this distribution.
    pub fn expectation(&self, table: &[f64]) -> f64 {
        self.weights.iter().zip(table).map(|(w, u)| w * u).sum()
    }
}

/// What a learner plays in one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Policy {
    Pure(Strategy),
    Mixed(MixedStrategy),
}

impl Policy {
    pub fn as_pure(&self) -> Option<Strategy> {
        match self {
            Policy::Pure(s) => Some(s.clone()),
            Policy::Mixed(m) => m.as_pure(),
        }
    }

    /// Expected payoff to `owner` of every pure strategy against this policy.
    pub fn feedback_against(&self, owner: Agent, game: &GameConfig) -> Vec<f64> {
        match self {
            Policy::Pure(s) => feedback_table(owner, s.entries(), game),
            Policy::Mixed(m) => {
                let mut acc = vec![0.0; game.space().len()];
                for (s, w) in m.support() {
                    for (a, u) in acc.iter_mut().zip(feedback_table(owner, s.entries(), game)) {
                        *a += w * u;
                    }
                }
                acc
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pub cumulative: Vec<f64>,
    pub step_count: usize,
    pub current: Policy,
}

impl LearnerState {
    pub fn new(cfg: &LearnerConfig) -> Self {
        LearnerState {
            cumulative: vec![0.0; cfg.game.space().len()],
            step_count: 0,
            current: Policy::Pure(cfg.initial.clone()),
        }
    }
}

/// The ℓ1 iterate: argmax of `Σu(w) − (2/M)·[w ≠ α]`, largest strategy on ties.
pub fn l1_update(state: &LearnerState, cfg: &LearnerConfig) -> Result<Strategy> {
    if state.step_count == 0 {
        return Err(Error::NoFeedback);
    }
    let space = cfg.game.space();
    let alpha = space.index_of(&cfg.reference);
    let penalty = 2.0 / cfg.learning_rate;
    let objective = |i: usize, c: f64| if i == alpha { c } else { c - penalty };
    let best = state
        .cumulative
        .iter()
        .enumerate()
        .map(|(i, &c)| objective(i, c))
        .fold(f64::NEG_INFINITY, f64::max);
    let winner = state
        .cumulative
        .iter()
        .enumerate()
        .rposition(|(i, &c)| objective(i, c) >= best - PAYOFF_TOL)
        .expect("nonempty strategy space");
    Ok(space.strategy(winner))
}

/// The ℓ2 iterate: projection of `α + M·Σu` onto the simplex.
///
/// The projection is unique, so no tie rule is involved.
pub fn l2_update(state: &LearnerState, cfg: &LearnerConfig) -> Result<MixedStrategy> {
    if state.step_count == 0 {
        return Err(Error::NoFeedback);
    }
    let space = cfg.game.space();
    let alpha = space.index_of(&cfg.reference);
    let shifted: Vec<f64> = state
        .cumulative
        .iter()
        .enumerate()
        .map(|(i, &c)| cfg.learning_rate * c + if i == alpha { 1.0 } else { 0.0 })
        .collect();
    let weights = project_to_simplex(&shifted)?;
    Ok(MixedStrategy { space, weights })
}

/// One round against a pure opponent. Returns the strategy played this round
/// and the updated state.
pub fn step(
    state: &LearnerState,
    cfg: &LearnerConfig,
    opponent: &Strategy,
) -> Result<(Policy, LearnerState)> {
    cfg.game.check(opponent)?;
    step_with_feedback(
        state,
        cfg,
        &feedback_table(cfg.role, opponent.entries(), &cfg.game),
    )
}

/// One round given the full feedback table for this step.
pub fn step_with_feedback(
    state: &LearnerState,
    cfg: &LearnerConfig,
    feedback: &[f64],
) -> Result<(Policy, LearnerState)> {
    if state.step_count >= cfg.horizon {
        return Err(Error::HorizonExceeded {
            steps: state.step_count,
            horizon: cfg.horizon,
        });
    }
    if feedback.len() != state.cumulative.len() {
        return Err(invalid(format!(
            "feedback has {} entries, expected {}",
            feedback.len(),
            state.cumulative.len()
        )));
    }
    let played = state.current.clone();
    let mut next = LearnerState {
        cumulative: state
            .cumulative
            .iter()
            .zip(feedback)
            .map(|(c, u)| c + u)
            .collect(),
        step_count: state.step_count + 1,
        current: played.clone(),
    };
    next.current = match cfg.regularizer {
        Regularizer::L1 => Policy::Pure(l1_update(&next, cfg)?),
        Regularizer::L2 => Policy::Mixed(l2_update(&next, cfg)?),
    };
    Ok((played, next))
}

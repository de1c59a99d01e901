//! The finite-round alternating-offers game.
//!
//! Two agents bargain over a unit surplus for `rounds` rounds. The proposer
//! `P` makes the offer in odd rounds and the responder `R` in even rounds.
//! In every round the proposing agent names an offer (the responder's share)
//! and the responding agent simultaneously names an acceptance threshold;
//! the first round whose offer is at least the threshold settles the game.
//! Agreement at round `k` on share `y` pays the round's proposer
//! `δ^(k-1)·(1-y)` and its responder `δ^(k-1)·y`. No agreement pays zero.
//!
//! Strategies live on the grid `{0, 1/D, …, 1}` and are stored as integer
//! grid indices, so acceptance is decided by integer comparison.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance used when comparing floating-point payoffs.
pub const PAYOFF_TOL: f64 = 1e-9;

/// One of the two bargaining agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    /// Proposes in rounds 1, 3, 5, …
    Proposer,
    /// Proposes in rounds 2, 4, 6, …
    Responder,
}

impl Agent {
    pub fn opponent(self) -> Agent {
        match self {
            Agent::Proposer => Agent::Responder,
            Agent::Responder => Agent::Proposer,
        }
    }

    /// Whether this agent makes the offer in (1-based) round `round`.
    pub fn proposes_in(self, round: usize) -> bool {
        let odd = round % 2 == 1;
        match self {
            Agent::Proposer => odd,
            Agent::Responder => !odd,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Agent::Proposer => "P",
            Agent::Responder => "R",
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameters of the game `G^(n)` together with its strategy grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    rounds: usize,
    discount: f64,
    grid: u32,
}

impl GameConfig {
    pub fn new(rounds: usize, discount: f64, grid: u32) -> Result<Self> {
        if rounds == 0 {
            return Err(invalid("rounds must be at least 1"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(invalid(format!("discount {discount} must lie in (0, 1)")));
        }
        if grid < 2 {
            return Err(invalid(format!("grid size {grid} must be at least 2")));
        }
        Ok(GameConfig {
            rounds,
            discount,
            grid,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// The discretization constant `D`.
    pub fn grid(&self) -> u32 {
        self.grid
    }

    /// `δ^(round-1)` for a 1-based round.
    pub fn discount_at(&self, round: usize) -> f64 {
        self.discount.powi(round as i32 - 1)
    }

    /// Real value of grid index `index`.
    pub fn value(&self, index: u32) -> f64 {
        f64::from(index) / f64::from(self.grid)
    }

    pub fn space(&self) -> StrategySpace {
        StrategySpace {
            rounds: self.rounds,
            grid: self.grid,
        }
    }

    /// Checks that `s` has one valid grid index per round.
    pub fn check(&self, s: &Strategy) -> Result<()> {
        if s.len() != self.rounds {
            return Err(invalid(format!(
                "strategy has {} entries but the game has {} rounds",
                s.len(),
                self.rounds
            )));
        }
        if let Some(&bad) = s.entries().iter().find(|&&e| e > self.grid) {
            return Err(invalid(format!(
                "grid index {bad} is outside 0..={}",
                self.grid
            )));
        }
        Ok(())
    }

    fn discounts(&self) -> Vec<f64> {
        (1..=self.rounds).map(|k| self.discount_at(k)).collect()
    }
}

/// A pure strategy: one grid index per round.
///
/// Entry `k` is an offer in rounds the owner proposes and an acceptance
/// threshold otherwise. The derived ordering is lexicographic with round 1
/// most significant, which is the order used for tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Strategy(Vec<u32>);

impl Strategy {
    pub fn new(entries: Vec<u32>) -> Self {
        Strategy(entries)
    }

    /// Builds a strategy from real values that must be exact grid points.
    pub fn from_values(values: &[f64], grid: u32) -> Result<Self> {
        values
            .iter()
            .map(|&v| exact_index(v, grid))
            .collect::<Result<Vec<_>>>()
            .map(Strategy)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry for a 1-based round.
    pub fn round(&self, round: usize) -> u32 {
        self.0[round - 1]
    }

    pub fn values(&self, grid: u32) -> Vec<f64> {
        self.0
            .iter()
            .map(|&i| f64::from(i) / f64::from(grid))
            .collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn exact_index(v: f64, grid: u32) -> Result<u32> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(format!("value {v} is outside [0, 1]")));
    }
    let scaled = v * f64::from(grid);
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-9 {
        return Err(invalid(format!(
            "value {v} is not a multiple of 1/{grid}; nearest grid points are {} and {}",
            scaled.floor() / f64::from(grid),
            scaled.ceil() / f64::from(grid)
        )));
    }
    Ok(rounded as u32)
}

/// A point on the grid `{0, 1/D, …, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridValue {
    pub index: u32,
    pub grid: u32,
}

impl GridValue {
    pub fn new(index: u32, grid: u32) -> Self {
        GridValue { index, grid }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.index) / f64::from(self.grid)
    }
}

impl fmt::Display for GridValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.index, self.grid)
    }
}

/// Enumeration of the pure strategy set `S^n`.
///
/// Indices are mixed-radix with round 1 as the most significant digit, so
/// index order coincides with the lexicographic order on strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategySpace {
    pub rounds: usize,
    pub grid: u32,
}

impl StrategySpace {
    pub fn len(&self) -> usize {
        (self.grid as usize + 1).pow(self.rounds as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, s: &Strategy) -> usize {
        let base = self.grid as usize + 1;
        s.entries()
            .iter()
            .fold(0usize, |acc, &e| acc * base + e as usize)
    }

    pub fn strategy(&self, mut index: usize) -> Strategy {
        let base = self.grid as usize + 1;
        let mut entries = vec![0u32; self.rounds];
        for slot in entries.iter_mut().rev() {
            *slot = (index % base) as u32;
            index /= base;
        }
        Strategy(entries)
    }

    pub fn iter(&self) -> impl Iterator<Item = Strategy> + '_ {
        (0..self.len()).map(move |i| self.strategy(i))
    }
}

/// Result of playing one strategy profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub agreement_round: Option<usize>,
    pub responder_share: Option<GridValue>,
    pub payoff_p: f64,
    pub payoff_r: f64,
}

impl Outcome {
    pub fn payoff(&self, agent: Agent) -> f64 {
        match agent {
            Agent::Proposer => self.payoff_p,
            Agent::Responder => self.payoff_r,
        }
    }
}

/// First agreeing round (0-based) and the accepted offer index.
fn settle(p: &[u32], r: &[u32]) -> Option<(usize, u32)> {
    p.iter().zip(r).enumerate().find_map(|(k, (&sp, &sr))| {
        let (offer, threshold) = if k % 2 == 0 { (sp, sr) } else { (sr, sp) };
        (offer >= threshold).then_some((k, offer))
    })
}

fn owner_payoff(owner: Agent, own: &[u32], opp: &[u32], discounts: &[f64], grid: f64) -> f64 {
    let (p, r) = match owner {
        Agent::Proposer => (own, opp),
        Agent::Responder => (opp, own),
    };
    match settle(p, r) {
        None => 0.0,
        Some((k, offer)) => {
            let share = f64::from(offer) / grid;
            let owner_proposes = owner.proposes_in(k + 1);
            discounts[k] * if owner_proposes { 1.0 - share } else { share }
        }
    }
}

/// Plays `(s_p, s_r)` to completion.
pub fn play(s_p: &Strategy, s_r: &Strategy, cfg: &GameConfig) -> Result<Outcome> {
    cfg.check(s_p)?;
    cfg.check(s_r)?;
    Ok(match settle(s_p.entries(), s_r.entries()) {
        None => Outcome {
            agreement_round: None,
            responder_share: None,
            payoff_p: 0.0,
            payoff_r: 0.0,
        },
        Some((k, offer)) => {
            let round = k + 1;
            let disc = cfg.discount_at(round);
            let share = cfg.value(offer);
            let (to_p, to_r) = if Agent::Proposer.proposes_in(round) {
                (disc * (1.0 - share), disc * share)
            } else {
                (disc * share, disc * (1.0 - share))
            };
            Outcome {
                agreement_round: Some(round),
                responder_share: Some(GridValue::new(offer, cfg.grid)),
                payoff_p: to_p,
                payoff_r: to_r,
            }
        }
    })
}

/// Payoff to `owner` when it plays `own` against `opp`.
pub fn utility(owner: Agent, own: &Strategy, opp: &Strategy, cfg: &GameConfig) -> Result<f64> {
    cfg.check(own)?;
    cfg.check(opp)?;
    Ok(owner_payoff(
        owner,
        own.entries(),
        opp.entries(),
        &cfg.discounts(),
        f64::from(cfg.grid),
    ))
}

/// Payoff to `owner` for real-valued (not necessarily on-grid) strategies.
///
/// Offers are accepted when they reach the threshold up to `1e-12`, so that
/// values computed by different arithmetic routes still compare as equal.
pub fn utility_continuous(owner: Agent, own: &[f64], opp: &[f64], cfg: &GameConfig) -> f64 {
    let (p, r) = match owner {
        Agent::Proposer => (own, opp),
        Agent::Responder => (opp, own),
    };
    for (k, (&sp, &sr)) in p.iter().zip(r).enumerate() {
        let round = k + 1;
        let (offer, threshold) = if k % 2 == 0 { (sp, sr) } else { (sr, sp) };
        if offer >= threshold - 1e-12 {
            let disc = cfg.discount_at(round);
            return disc
                * if owner.proposes_in(round) {
                    1.0 - offer
                } else {
                    offer
                };
        }
    }
    0.0
}

/// Full-information feedback: the owner's payoff for every pure strategy
/// against the opponent's played strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackVector {
    pub owner: Agent,
    pub against: Strategy,
    pub space: StrategySpace,
    table: Vec<f64>,
}

impl FeedbackVector {
    pub fn get(&self, s: &Strategy) -> f64 {
        self.table[self.space.index_of(s)]
    }

    /// Payoffs indexed by [`StrategySpace`] order.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

pub fn feedback_vector(
    owner: Agent,
    opponent_strategy: &Strategy,
    cfg: &GameConfig,
) -> Result<FeedbackVector> {
    cfg.check(opponent_strategy)?;
    let table = feedback_table(owner, opponent_strategy.entries(), cfg);
    Ok(FeedbackVector {
        owner,
        against: opponent_strategy.clone(),
        space: cfg.space(),
        table,
    })
}

/// Unchecked feedback table in index order.
pub(crate) fn feedback_table(owner: Agent, opp: &[u32], cfg: &GameConfig) -> Vec<f64> {
    let space = cfg.space();
    let discounts = cfg.discounts();
    let grid = f64::from(cfg.grid);
    let mut out = Vec::with_capacity(space.len());
    let mut digits = vec![0u32; cfg.rounds];
    for _ in 0..space.len() {
        out.push(owner_payoff(owner, &digits, opp, &discounts, grid));
        // odometer increment, last round least significant
        for d in digits.iter_mut().rev() {
            if *d < cfg.grid {
                *d += 1;
                break;
            }
            *d = 0;
        }
    }
    out
}

/// All pure strategies maximizing the owner's payoff, in lexicographic order.
pub fn best_responses(
    owner: Agent,
    opponent_strategy: &Strategy,
    cfg: &GameConfig,
) -> Result<Vec<Strategy>> {
    let fb = feedback_vector(owner, opponent_strategy, cfg)?;
    let best = fb.table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(fb
        .table
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - PAYOFF_TOL)
        .map(|(i, _)| fb.space.strategy(i))
        .collect())
}

/// Whether each strategy is a best response to the other.
pub fn is_pure_ne(s_p: &Strategy, s_r: &Strategy, cfg: &GameConfig) -> Result<bool> {
    cfg.check(s_p)?;
    cfg.check(s_r)?;
    Ok(is_best_response(Agent::Proposer, s_p, s_r, cfg)
        && is_best_response(Agent::Responder, s_r, s_p, cfg))
}

pub(crate) fn is_best_response(
    owner: Agent,
    own: &Strategy,
    opp: &Strategy,
    cfg: &GameConfig,
) -> bool {
    let table = feedback_table(owner, opp.entries(), cfg);
    let best = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    table[cfg.space().index_of(own)] >= best - PAYOFF_TOL
}

/// The accepted offer at the agreement round, if any.
pub fn equilibrium_value(
    s_p: &Strategy,
    s_r: &Strategy,
    cfg: &GameConfig,
) -> Result<Option<GridValue>> {
    Ok(play(s_p, s_r, cfg)?.responder_share)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rounds: usize, discount: f64, grid: u32) -> GameConfig {
        GameConfig::new(rounds, discount, grid).unwrap()
    }

    fn s(values: &[f64], grid: u32) -> Strategy {
        Strategy::from_values(values, grid).unwrap()
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(GameConfig::new(0, 0.9, 4).is_err());
        assert!(GameConfig::new(1, 1.0, 4).is_err());
        assert!(GameConfig::new(1, 0.0, 4).is_err());
        assert!(GameConfig::new(1, 0.5, 1).is_err());
    }

    #[test]
    fn equal_split_single_round() {
        let cfg = g(1, 0.9, 2);
        let out = play(&s(&[0.5], 2), &s(&[0.5], 2), &cfg).unwrap();
        assert_eq!(out.agreement_round, Some(1));
        assert_eq!(out.payoff_p, 0.5);
        assert_eq!(out.payoff_r, 0.5);
    }

    #[test]
    fn second_round_deal_is_discounted() {
        let cfg = g(2, 0.9, 10);
        let out = play(&s(&[0.3, 0.4], 10), &s(&[0.4, 0.6], 10), &cfg).unwrap();
        assert_eq!(out.agreement_round, Some(2));
        assert_eq!(out.responder_share, Some(GridValue::new(6, 10)));
        assert!((out.payoff_p - 0.54).abs() < 1e-12);
        assert!((out.payoff_r - 0.36).abs() < 1e-12);
    }

    #[test]
    fn disagreement_pays_nothing() {
        let cfg = g(2, 0.9, 10);
        let out = play(&s(&[0.5, 0.3], 10), &s(&[0.6, 0.2], 10), &cfg).unwrap();
        assert_eq!(out.agreement_round, None);
        assert_eq!((out.payoff_p, out.payoff_r), (0.0, 0.0));
        assert_eq!(
            equilibrium_value(&s(&[0.5, 0.3], 10), &s(&[0.6, 0.2], 10), &cfg).unwrap(),
            None
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let cfg = g(2, 0.9, 4);
        assert!(play(&Strategy::new(vec![1]), &Strategy::new(vec![1, 1]), &cfg).is_err());
        assert!(play(&Strategy::new(vec![5, 1]), &Strategy::new(vec![1, 1]), &cfg).is_err());
    }

    #[test]
    fn off_grid_value_names_neighbours() {
        let err = Strategy::from_values(&[0.3], 4).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0.25") && msg.contains("0.5"), "{msg}");
    }

    #[test]
    fn feedback_single_round() {
        let cfg = g(1, 0.9, 2);
        let fb = feedback_vector(Agent::Proposer, &s(&[0.5], 2), &cfg).unwrap();
        assert_eq!(fb.table(), &[0.0, 0.5, 0.0]);
        let fb = feedback_vector(Agent::Responder, &s(&[0.5], 2), &cfg).unwrap();
        assert_eq!(fb.table(), &[0.5, 0.5, 0.0]);
        assert_eq!(fb.len(), 3);
    }

    #[test]
    fn zero_offer_gives_responder_nothing() {
        let cfg = g(1, 0.9, 7);
        let fb = feedback_vector(Agent::Responder, &Strategy::new(vec![0]), &cfg).unwrap();
        assert!(fb.table().iter().all(|&v| v == 0.0));
        let br = best_responses(Agent::Responder, &Strategy::new(vec![0]), &cfg).unwrap();
        assert_eq!(br.len(), 8);
    }

    #[test]
    fn best_responses_single_round() {
        let cfg = g(1, 0.9, 4);
        let br = best_responses(Agent::Proposer, &s(&[0.5], 4), &cfg).unwrap();
        assert_eq!(br, vec![s(&[0.5], 4)]);
        let br = best_responses(Agent::Responder, &s(&[0.5], 4), &cfg).unwrap();
        assert_eq!(br, vec![s(&[0.0], 4), s(&[0.25], 4), s(&[0.5], 4)]);
    }

    #[test]
    fn pure_ne_examples() {
        let cfg = g(1, 0.9, 4);
        assert!(is_pure_ne(&s(&[0.5], 4), &s(&[0.5], 4), &cfg).unwrap());
        assert!(!is_pure_ne(&s(&[0.5], 4), &s(&[0.25], 4), &cfg).unwrap());
        assert!(is_pure_ne(&s(&[0.0], 4), &s(&[0.0], 4), &cfg).unwrap());
    }

    #[test]
    fn equilibrium_value_reads_accepted_offer() {
        let cfg = g(1, 0.9, 4);
        assert_eq!(
            equilibrium_value(&s(&[0.25], 4), &s(&[0.25], 4), &cfg).unwrap(),
            Some(GridValue::new(1, 4))
        );
        let cfg = g(2, 0.9, 10);
        let v = equilibrium_value(&s(&[0.3, 0.4], 10), &s(&[0.4, 0.6], 10), &cfg).unwrap();
        assert_eq!(v.map(|v| v.value()), Some(0.6));
    }

    #[test]
    fn space_index_roundtrip_and_order() {
        let space = StrategySpace { rounds: 3, grid: 4 };
        assert_eq!(space.len(), 125);
        let all: Vec<_> = space.iter().collect();
        for (i, st) in all.iter().enumerate() {
            assert_eq!(space.index_of(st), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn continuous_payoff_matches_grid_payoff() {
        let cfg = g(2, 0.8, 8);
        for sp in cfg.space().iter() {
            for sr in cfg.space().iter().step_by(7) {
                let grid = utility(Agent::Proposer, &sp, &sr, &cfg).unwrap();
                let cont = utility_continuous(Agent::Proposer, &sp.values(8), &sr.values(8), &cfg);
                assert!((grid - cont).abs() < 1e-12);
            }
        }
    }
}

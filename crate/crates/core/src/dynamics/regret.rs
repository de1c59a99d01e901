//! External regret against adversaries whose per-round values sit in bins of
//! width at least `1/D`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ftrl::{step_with_feedback, LearnerConfig, LearnerState, Policy};
use crate::game::{utility_continuous, Agent, GameConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySchedule {
    /// Allowed values for each round.
    pub bins: Vec<Vec<f64>>,
    /// Opponent strategy at each step, one value per round.
    pub sequence: Vec<Vec<f64>>,
}

impl AdversarySchedule {
    pub fn rounds(&self) -> usize {
        self.bins.len()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// Validates that values within each round are at least `bin_spacing` apart
/// and that every step draws from its round's values.
pub fn make_adversary(
    bin_spacing: f64,
    bins: Vec<Vec<f64>>,
    sequence: Vec<Vec<f64>>,
) -> Result<AdversarySchedule> {
    if !(bin_spacing > 0.0) {
        return Err(invalid("bin spacing must be positive"));
    }
    for (k, values) in bins.iter().enumerate() {
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid(format!(
                "round {} has a value outside [0, 1]",
                k + 1
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for w in sorted.windows(2) {
            if w[1] - w[0] < bin_spacing - 1e-12 {
                return Err(Error::BinSpacing {
                    round: k + 1,
                    a: w[0],
                    b: w[1],
                    min_spacing: bin_spacing,
                });
            }
        }
    }
    for (t, s) in sequence.iter().enumerate() {
        if s.len() != bins.len() {
            return Err(invalid(format!(
                "step {} has {} entries for {} rounds",
                t + 1,
                s.len(),
                bins.len()
            )));
        }
        for (k, v) in s.iter().enumerate() {
            if !bins[k].iter().any(|b| (b - v).abs() <= 1e-12) {
                return Err(invalid(format!(
                    "step {} round {} value {v} is not among the round's bin values",
                    t + 1,
                    k + 1
                )));
            }
        }
    }
    Ok(AdversarySchedule { bins, sequence })
}

/// Single-round adversary alternating through `values` for `horizon` steps.
pub fn cycling_adversary(
    values: &[f64],
    horizon: usize,
    bin_spacing: f64,
) -> Result<AdversarySchedule> {
    if values.is_empty() {
        return Err(invalid("a cycling adversary needs at least one value"));
    }
    let sequence = (0..horizon)
        .map(|t| vec![values[t % values.len()]])
        .collect();
    make_adversary(bin_spacing, vec![values.to_vec()], sequence)
}

fn check_against_game(adv: &AdversarySchedule, game: &GameConfig) -> Result<()> {
    if adv.rounds() != game.rounds() {
        return Err(invalid(format!(
            "adversary has {} rounds, the game has {}",
            adv.rounds(),
            game.rounds()
        )));
    }
    let min_spacing = 1.0 / f64::from(game.grid());
    // re-validate with the game's grid spacing
    make_adversary(min_spacing, adv.bins.clone(), Vec::new()).map(|_| ())
}

/// The learner's payoff for every pure strategy against one adversary step.
fn step_table(owner: Agent, opp: &[f64], game: &GameConfig) -> Vec<f64> {
    game.space()
        .iter()
        .map(|s| utility_continuous(owner, &s.values(game.grid()), opp, game))
        .collect()
}

/// Regret of `played` (a learner in role `learner`) against the adversary.
///
/// Returns `(regret_vs_grid, regret_vs_continuous)`. The grid benchmark is the
/// best fixed pure strategy; the continuous benchmark also tries, per round,
/// every adversary value and its neighbours one grid step away.
pub fn external_regret(
    played: &[Policy],
    adversary: &AdversarySchedule,
    learner: Agent,
    game: &GameConfig,
) -> Result<(f64, f64)> {
    if played.len() != adversary.len() {
        return Err(invalid(format!(
            "{} plays against {} adversary steps",
            played.len(),
            adversary.len()
        )));
    }
    check_against_game(adversary, game)?;
    let space = game.space();
    let mut earned = 0.0;
    let mut cumulative = vec![0.0; space.len()];
    for (policy, opp) in played.iter().zip(&adversary.sequence) {
        let table = step_table(learner, opp, game);
        earned += match policy {
            Policy::Pure(s) => {
                game.check(s)?;
                table[space.index_of(s)]
            }
            Policy::Mixed(m) => m.expectation(&table),
        };
        for (c, u) in cumulative.iter_mut().zip(&table) {
            *c += u;
        }
    }
    let best_grid = cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let step = 1.0 / f64::from(game.grid());
    let candidates: Vec<Vec<f64>> = adversary
        .bins
        .iter()
        .map(|values| {
            let mut c: Vec<f64> = (0..=game.grid()).map(|i| game.value(i)).collect();
            for &v in values {
                for x in [v - step, v, v + step] {
                    if (0.0..=1.0).contains(&x) {
                        c.push(x);
                    }
                }
            }
            c.sort_by(f64::total_cmp);
            c.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
            c
        })
        .collect();
    let mut best_cont = best_grid;
    let mut idx = vec![0usize; candidates.len()];
    let mut point = vec![0.0; candidates.len()];
    'outer: loop {
        for (k, &i) in idx.iter().enumerate() {
            point[k] = candidates[k][i];
        }
        let total: f64 = adversary
            .sequence
            .iter()
            .map(|opp| utility_continuous(learner, &point, opp, game))
            .sum();
        best_cont = best_cont.max(total);
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < candidates[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    Ok((best_grid - earned, best_cont - earned))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub horizon: usize,
    pub regret_grid: f64,
    pub regret_continuous: f64,
}

impl RegretReport {
    pub fn normalized(&self) -> f64 {
        self.regret_continuous / (self.horizon as f64).sqrt()
    }
}

/// Runs a learner against the schedule with full-information feedback and
/// reports both regrets.
pub fn play_against_adversary(
    cfg: &LearnerConfig,
    adversary: &AdversarySchedule,
) -> Result<RegretReport> {
    if adversary.len() != cfg.horizon {
        return Err(invalid(format!(
            "adversary has {} steps, the learner's horizon is {}",
            adversary.len(),
            cfg.horizon
        )));
    }
    check_against_game(adversary, &cfg.game)?;
    let mut state = LearnerState::new(cfg);
    let mut played = Vec::with_capacity(cfg.horizon);
    for opp in &adversary.sequence {
        let table = step_table(cfg.role, opp, &cfg.game);
        let (p, next) = step_with_feedback(&state, cfg, &table)?;
        played.push(p);
        state = next;
    }
    let (regret_grid, regret_continuous) =
        external_regret(&played, adversary, cfg.role, &cfg.game)?;
    Ok(RegretReport {
        horizon: cfg.horizon,
        regret_grid,
        regret_continuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftrl::Regularizer;
    use crate::game::Strategy;

    #[test]
    fn spacing_rules() {
        assert!(make_adversary(0.1, vec![vec![0.0, 0.15, 0.3]], vec![]).is_ok());
        assert!(matches!(
            make_adversary(0.1, vec![vec![0.1, 0.15]], vec![]),
            Err(Error::BinSpacing { round: 1, .. })
        ));
        let r1: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let r2: Vec<f64> = (0..10).map(|i| 0.05 + i as f64 / 10.0).collect();
        assert!(make_adversary(0.1, vec![r1, r2], vec![]).is_ok());
    }

    #[test]
    fn sequence_must_use_bin_values() {
        assert!(make_adversary(0.1, vec![vec![0.2, 0.5]], vec![vec![0.3]]).is_err());
        assert!(make_adversary(0.1, vec![vec![0.2, 0.5]], vec![vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn converged_best_response_has_zero_regret() {
        let game = GameConfig::new(1, 0.9, 10).unwrap();
        let adv = cycling_adversary(&[0.3], 20, 0.1).unwrap();
        let played = vec![Policy::Pure(Strategy::new(vec![3])); 20];
        let (g, c) = external_regret(&played, &adv, Agent::Proposer, &game).unwrap();
        assert!(g.abs() < 1e-12 && c.abs() < 1e-12);
    }

    #[test]
    fn non_learner_has_linear_regret() {
        let game = GameConfig::new(1, 0.9, 10).unwrap();
        let t = 25;
        let adv = cycling_adversary(&[0.0], t, 0.1).unwrap();
        let played = vec![Policy::Pure(Strategy::new(vec![10])); t];
        let (g, c) = external_regret(&played, &adv, Agent::Proposer, &game).unwrap();
        assert!((g - t as f64).abs() < 1e-12);
        assert!((c - t as f64).abs() < 1e-12);
    }

    #[test]
    fn off_grid_adversary_rewards_continuous_benchmark() {
        // thresholds at 0.35 on a tenth grid: the best grid offer is 0.4
        let game = GameConfig::new(1, 0.9, 10).unwrap();
        let adv = cycling_adversary(&[0.35], 10, 0.1).unwrap();
        let played = vec![Policy::Pure(Strategy::new(vec![4])); 10];
        let (g, c) = external_regret(&played, &adv, Agent::Proposer, &game).unwrap();
        assert!(g.abs() < 1e-12);
        assert!((c - 0.5).abs() < 1e-9);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let game = GameConfig::new(1, 0.9, 10).unwrap();
        let adv = cycling_adversary(&[0.3], 5, 0.1).unwrap();
        let played = vec![Policy::Pure(Strategy::new(vec![3])); 4];
        assert!(external_regret(&played, &adv, Agent::Proposer, &game).is_err());
    }

    #[test]
    fn l2_learner_regret_is_sublinear_at_small_scale() {
        let t = 100;
        let game = GameConfig::new(1, 0.9, t as u32).unwrap();
        let cfg = LearnerConfig::new(
            Agent::Proposer,
            game,
            t,
            1.0 / (t as f64).sqrt(),
            Regularizer::L2,
            Strategy::new(vec![t as u32]),
            Strategy::new(vec![t as u32]),
        )
        .unwrap();
        let adv = cycling_adversary(&[0.3, 0.7], t, 1.0 / t as f64).unwrap();
        let rep = play_against_adversary(&cfg, &adv).unwrap();
        assert!(rep.regret_grid <= 10.0 * (t as f64).sqrt());
        assert!(rep.regret_continuous >= rep.regret_grid - 1e-12);
    }
}

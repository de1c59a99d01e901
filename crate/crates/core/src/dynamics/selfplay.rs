use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ftrl::{step_with_feedback, LearnerConfig, LearnerState, Policy};
use crate::game::{is_pure_ne, play, Agent, GameConfig, GridValue, Strategy};

/// Where and how a trajectory settled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// First step of the final constant run.
    pub t_prime: usize,
    pub profile: (Strategy, Strategy),
    pub value: Option<GridValue>,
    pub agreement_round: Option<usize>,
    pub payoffs: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// `(w_P^(t), w_R^(t))` for `t = 1..=T`.
    pub profiles: Vec<(Policy, Policy)>,
    pub convergence: Option<Convergence>,
}

impl TrajectoryRecord {
    pub fn converged_at(&self) -> Option<usize> {
        self.convergence.as_ref().map(|c| c.t_prime)
    }

    pub fn ne_value(&self) -> Option<GridValue> {
        self.convergence.as_ref().and_then(|c| c.value)
    }

    /// The profiles as pure strategy pairs, when every step is pure.
    pub fn pure_profiles(&self) -> Option<Vec<(Strategy, Strategy)>> {
        self.profiles
            .iter()
            .map(|(p, r)| Some((p.as_pure()?, r.as_pure()?)))
            .collect()
    }
}

/// Runs both learners simultaneously for the shared horizon.
pub fn self_play(
    cfg_p: &LearnerConfig,
    cfg_r: &LearnerConfig,
    game: &GameConfig,
) -> Result<TrajectoryRecord> {
    if cfg_p.role != Agent::Proposer || cfg_r.role != Agent::Responder {
        return Err(invalid(
            "self-play needs one proposer and one responder config",
        ));
    }
    if cfg_p.game != *game || cfg_r.game != *game {
        return Err(invalid("learner configs must share the game"));
    }
    if cfg_p.horizon != cfg_r.horizon {
        return Err(invalid(format!(
            "horizons differ: {} vs {}",
            cfg_p.horizon, cfg_r.horizon
        )));
    }
    let mut sp = LearnerState::new(cfg_p);
    let mut sr = LearnerState::new(cfg_r);
    let mut profiles = Vec::with_capacity(cfg_p.horizon);
    for _ in 0..cfg_p.horizon {
        let fb_p = sr.current.feedback_against(Agent::Proposer, game);
        let fb_r = sp.current.feedback_against(Agent::Responder, game);
        let (played_p, next_p) = step_with_feedback(&sp, cfg_p, &fb_p)?;
        let (played_r, next_r) = step_with_feedback(&sr, cfg_r, &fb_r)?;
        profiles.push((played_p, played_r));
        sp = next_p;
        sr = next_r;
    }
    let convergence = detect_convergence(&profiles, game);
    Ok(TrajectoryRecord {
        profiles,
        convergence,
    })
}

/// Smallest `t′` such that the profile is constant from `t′` through the end
/// of the trajectory and is a pure Nash equilibrium.
pub fn detect_convergence(profiles: &[(Policy, Policy)], game: &GameConfig) -> Option<Convergence> {
    let (last_p, last_r) = profiles.last()?;
    let profile = (last_p.as_pure()?, last_r.as_pure()?);
    let same = |(p, r): &(Policy, Policy)| {
        p.as_pure().as_ref() == Some(&profile.0) && r.as_pure().as_ref() == Some(&profile.1)
    };
    let run = profiles.iter().rev().take_while(|x| same(x)).count();
    if !is_pure_ne(&profile.0, &profile.1, game).ok()? {
        return None;
    }
    let outcome = play(&profile.0, &profile.1, game).ok()?;
    Some(Convergence {
        t_prime: profiles.len() - run + 1,
        value: outcome.responder_share,
        agreement_round: outcome.agreement_round,
        payoffs: (outcome.payoff_p, outcome.payoff_r),
        profile,
    })
}

use std::path::Path;

use anyhow::Context;
use bargainlab::dynamics::{self_play, TrajectoryRecord};
use bargainlab::ftrl::{LearnerConfig, Regularizer};
use bargainlab::{Agent, GameConfig, Strategy};
use serde_json::json;

use crate::args::{GameArgs, LearnerArgs, RunArgs};
use crate::config::{parse_strategy, RunManifest};
use crate::output::{policy_json, profile_payoffs};
use crate::{Failure, Internal, Invalid, Outcome, EXIT_INCOMPLETE, EXIT_OK};

pub fn game_from(a: &GameArgs) -> Result<GameConfig, Failure> {
    GameConfig::new(a.rounds, a.delta, a.grid).invalid()
}

pub struct LearnerPair {
    pub game: GameConfig,
    pub regularizer: Regularizer,
    pub horizon: usize,
    pub rate: f64,
    pub alpha_p: Strategy,
    pub alpha_r: Strategy,
}

impl LearnerPair {
    pub fn new(
        game: &GameArgs,
        learner: &LearnerArgs,
        alpha_p: &str,
        alpha_r: &str,
        rounding: &mut Vec<String>,
    ) -> Result<Self, Failure> {
        let g = game_from(game)?;
        let regularizer = Regularizer::from_exponent(learner.reg).invalid()?;
        Ok(LearnerPair {
            game: g,
            regularizer,
            horizon: learner.horizon,
            rate: learner.rate,
            alpha_p: parse_strategy(alpha_p, g.rounds(), g.grid(), "alpha-p", rounding)
                .invalid()?,
            alpha_r: parse_strategy(alpha_r, g.rounds(), g.grid(), "alpha-r", rounding)
                .invalid()?,
        })
    }

    pub fn configs(
        &self,
        wp: &Strategy,
        wr: &Strategy,
    ) -> Result<(LearnerConfig, LearnerConfig), Failure> {
        let mk = |role, w: &Strategy, a: &Strategy| {
            LearnerConfig::new(
                role,
                self.game,
                self.horizon,
                self.rate,
                self.regularizer,
                w.clone(),
                a.clone(),
            )
        };
        Ok((
            mk(Agent::Proposer, wp, &self.alpha_p).invalid()?,
            mk(Agent::Responder, wr, &self.alpha_r).invalid()?,
        ))
    }

    pub fn play(&self, wp: &Strategy, wr: &Strategy) -> Result<TrajectoryRecord, Failure> {
        let (p, r) = self.configs(wp, wr)?;
        self_play(&p, &r, &self.game).internal()
    }
}

/// Summary numbers of one self-play run.
pub struct RunSummary {
    pub converged_at: Option<usize>,
    pub ne_round: Option<usize>,
    pub ne_value: Option<f64>,
    pub payoffs: (f64, f64),
}

pub fn summarize(rec: &TrajectoryRecord, game: &GameConfig) -> Result<RunSummary, Failure> {
    let payoffs = match &rec.convergence {
        Some(c) => c.payoffs,
        None => {
            let (p, r) = rec.profiles.last().context("empty trajectory").internal()?;
            profile_payoffs(p, r, game).internal()?
        }
    };
    Ok(RunSummary {
        converged_at: rec.converged_at(),
        ne_round: rec.convergence.as_ref().and_then(|c| c.agreement_round),
        ne_value: rec.ne_value().map(|v| v.value()),
        payoffs,
    })
}

pub fn run(a: &RunArgs) -> Outcome {
    let mut manifest = RunManifest::new("run", a).internal()?;
    let pair = LearnerPair::new(
        &a.game,
        &a.learner,
        &a.alpha_p,
        &a.alpha_r,
        &mut manifest.rounding,
    )?;
    let g = pair.game;
    let wp = parse_strategy(&a.wp, g.rounds(), g.grid(), "wp", &mut manifest.rounding).invalid()?;
    let wr = parse_strategy(&a.wr, g.rounds(), g.grid(), "wr", &mut manifest.rounding).invalid()?;
    let (cfg_p, _) = pair.configs(&wp, &wr)?;
    if let Some(w) = cfg_p.rate_warning() {
        eprintln!("warning: {w}");
        manifest.warnings.push(w);
    }
    if let Some(out) = &a.out {
        crate::output::ensure_writable(out).invalid()?;
    }
    let rec = pair.play(&wp, &wr)?;
    let s = summarize(&rec, &g)?;
    let mut record = json!({
        "manifest": manifest,
        "converged": s.converged_at.is_some(),
        "converged_at": s.converged_at,
        "ne_value": s.ne_value,
        "ne_value_grid": rec.ne_value().map(|v| v.to_string()),
        "ne_round": s.ne_round,
        "ne_profile": rec.convergence.as_ref().map(|c| [c.profile.0.to_string(), c.profile.1.to_string()]),
        "payoffs": { "proposer": s.payoffs.0, "responder": s.payoffs.1 },
        "steps": rec.profiles.len(),
    });
    if a.trace {
        record["trajectory"] = rec
            .profiles
            .iter()
            .map(
                |(p, r)| json!({ "proposer": policy_json(p, &g), "responder": policy_json(r, &g) }),
            )
            .collect();
    }
    let text = serde_json::to_string_pretty(&record).internal()? + "\n";
    match &a.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    match s.converged_at {
        Some(t) => {
            eprintln!(
                "converged at step {t} to value {}",
                rec.ne_value()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "none".into())
            );
            Ok(EXIT_OK)
        }
        None => {
            eprintln!("no convergence within {} steps", rec.profiles.len());
            Ok(EXIT_INCOMPLETE)
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .invalid()
}

use std::path::Path;

use anyhow::{anyhow, Context};
use bargainlab::dynamics::{make_adversary, play_against_adversary, AdversarySchedule};
use bargainlab::ftrl::{LearnerConfig, Regularizer};
use bargainlab::{Agent, GameConfig};
use serde::Deserialize;

use crate::args::{RegretArgs, Role};
use crate::config::{parse_strategy, RunManifest};
use crate::output::{ensure_writable, write_records};
use crate::{Internal, Invalid, Outcome, EXIT_OK};

/// Adversary file: allowed values per round, and a cycle of steps repeated
/// up to the horizon.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdversaryFile {
    bins: Vec<Vec<f64>>,
    cycle: Vec<Vec<f64>>,
}

fn load_adversary(path: Option<&Path>) -> anyhow::Result<AdversaryFile> {
    match path {
        None => Ok(AdversaryFile {
            bins: vec![vec![0.3, 0.7]],
            cycle: vec![vec![0.3], vec![0.7]],
        }),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            let f: AdversaryFile = serde_json::from_str(&text)
                .with_context(|| format!("cannot parse {}", p.display()))?;
            if f.cycle.is_empty() {
                anyhow::bail!("adversary cycle is empty");
            }
            Ok(f)
        }
    }
}

fn schedule(f: &AdversaryFile, horizon: usize) -> bargainlab::Result<AdversarySchedule> {
    let sequence = (0..horizon)
        .map(|t| f.cycle[t % f.cycle.len()].clone())
        .collect();
    make_adversary(1.0 / horizon as f64, f.bins.clone(), sequence)
}

pub fn regret(a: &RegretArgs) -> Outcome {
    let mut manifest = RunManifest::new("regret", a).internal()?;
    let horizons: Vec<usize> = a
        .horizons
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| anyhow!("horizon {s:?}: {e}"))
        })
        .collect::<anyhow::Result<_>>()
        .invalid()?;
    if horizons.iter().any(|&t| t < 2) {
        return Err(anyhow!("horizons must be at least 2")).invalid();
    }
    let regularizer = Regularizer::from_exponent(a.reg).invalid()?;
    let adv_file = load_adversary(a.adversary.as_deref()).invalid()?;
    let rounds = adv_file.bins.len();
    let role = match a.role {
        Role::Proposer => Agent::Proposer,
        Role::Responder => Agent::Responder,
    };
    let manifest_path = a.manifest.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".manifest");
        s.into()
    });
    ensure_writable(&a.out).invalid()?;
    ensure_writable(&manifest_path).invalid()?;

    let mut setups = Vec::new();
    for &t in &horizons {
        let grid = u32::try_from(t)
            .map_err(|_| anyhow!("horizon {t} too large"))
            .invalid()?;
        let game = GameConfig::new(rounds, a.delta, grid).invalid()?;
        let s = parse_strategy(&a.initial, rounds, grid, "initial", &mut manifest.rounding)
            .invalid()?;
        let cfg = LearnerConfig::new(
            role,
            game,
            t,
            a.rate_scale / (t as f64).sqrt(),
            regularizer,
            s.clone(),
            s,
        )
        .invalid()?;
        let adv = schedule(&adv_file, t).invalid()?;
        setups.push((cfg, adv));
    }
    let mut rows = Vec::new();
    for (cfg, adv) in &setups {
        let rep = play_against_adversary(cfg, adv).internal()?;
        rows.push(vec![
            rep.horizon.to_string(),
            rep.regret_grid.to_string(),
            rep.regret_continuous.to_string(),
            rep.normalized().to_string(),
        ]);
    }
    let header: Vec<String> = [
        "T",
        "regret_grid",
        "regret_continuous",
        "regret_over_sqrt_T",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    write_records(&a.out, &header, &rows).invalid()?;
    manifest.write(&manifest_path).invalid()?;
    Ok(EXIT_OK)
}

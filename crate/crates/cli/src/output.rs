use std::path::Path;

use anyhow::{Context, Result};
use bargainlab::ftrl::Policy;
use bargainlab::{play, GameConfig};
use serde_json::{json, Value};

/// Checks up front that the directory for `path` exists.
pub fn ensure_writable(path: &Path) -> Result<()> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        anyhow::bail!(
            "cannot write {}: {} is not a directory",
            path.display(),
            parent.display()
        );
    }
    if path.is_dir() {
        anyhow::bail!("cannot write {}: it is a directory", path.display());
    }
    Ok(())
}

/// Expected payoffs `(proposer, responder)` of a profile of possibly mixed
/// policies.
pub fn profile_payoffs(p: &Policy, r: &Policy, game: &GameConfig) -> Result<(f64, f64)> {
    let support = |pol: &Policy| match pol {
        Policy::Pure(s) => vec![(s.clone(), 1.0)],
        Policy::Mixed(m) => m.support().collect(),
    };
    let (mut up, mut ur) = (0.0, 0.0);
    for (sp, wp) in support(p) {
        for (sr, wr) in support(r) {
            let o = play(&sp, &sr, game)?;
            up += wp * wr * o.payoff_p;
            ur += wp * wr * o.payoff_r;
        }
    }
    Ok((up, ur))
}

pub fn policy_json(p: &Policy, game: &GameConfig) -> Value {
    let d = game.grid();
    let fmt = |s: &bargainlab::Strategy| {
        s.entries()
            .iter()
            .map(|i| format!("{i}/{d}"))
            .collect::<Vec<_>>()
    };
    match p {
        Policy::Pure(s) => json!(fmt(s)),
        Policy::Mixed(m) => Value::Array(
            m.support()
                .map(|(s, w)| json!({ "strategy": fmt(&s), "weight": w }))
                .collect(),
        ),
    }
}

/// Writes a header and string records as CSV in one go.
pub fn write_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

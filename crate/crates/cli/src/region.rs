use anyhow::anyhow;
use bargainlab::spe::{
    construct_certificate, payoff_gaps, prop2_check, theorem1_feasible, MarketParams, PayoffTarget,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{RegionArgs, RegionMode};
use crate::config::RunManifest;
use crate::output::{ensure_writable, write_records};
use crate::{Internal, Invalid, Outcome, EXIT_OK};

pub fn market_from(delta: f64, tau: f64, p: f64) -> Result<MarketParams, crate::Failure> {
    MarketParams::new(delta, tau, p).invalid()
}

pub fn spe_region(a: &RegionArgs) -> Outcome {
    let mut manifest = RunManifest::new("spe-region", a).internal()?;
    let mp = market_from(a.market.delta, a.market.tau, a.market.p)?;
    if a.resolution == 0 {
        return Err(anyhow!("resolution must be at least 1")).invalid();
    }
    let manifest_path = a.manifest.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".manifest");
        s.into()
    });
    ensure_writable(&a.out).invalid()?;
    ensure_writable(&manifest_path).invalid()?;
    if !mp.in_regime() {
        let w = format!(
            "opt-out cost {} exceeds delta^2/(1+delta) = {:.6}; no target is feasible",
            mp.optout_cost,
            mp.regime_bound()
        );
        eprintln!("warning: {w}");
        manifest.warnings.push(w);
    }

    let targets: Vec<(f64, f64)> = match a.mode {
        RegionMode::Enumerate | RegionMode::Gaps => {
            let r = a.resolution;
            (0..=r)
                .flat_map(|i| (0..=r).map(move |j| (i as f64 / r as f64, j as f64 / r as f64)))
                .collect()
        }
        RegionMode::Sample => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..a.samples)
                .map(|_| (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)))
                .collect()
        }
    };

    let mut header: Vec<String> = ["w1", "w2", "feasible", "W_f", "W_c1", "W_c2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let gaps = payoff_gaps(&mp);
    if a.mode == RegionMode::Gaps {
        header.push("candidate_gap".into());
        header.push("firm_gap".into());
    }
    let mut rows = Vec::with_capacity(targets.len());
    let mut feasible_count = 0;
    for (w1, w2) in targets {
        let tgt = PayoffTarget::new(w1, w2).invalid()?;
        let feasible = theorem1_feasible(&mp, &tgt);
        if feasible {
            feasible_count += 1;
            let cert = construct_certificate(&mp, &tgt).internal()?;
            if !prop2_check(&cert, &mp) {
                return Err(anyhow!("certificate for ({w1}, {w2}) fails its own checks"))
                    .internal();
            }
        }
        let (wf, wc1, wc2) = tgt.payoffs(&mp);
        let mut row = vec![
            w1.to_string(),
            w2.to_string(),
            feasible.to_string(),
            wf.to_string(),
            wc1.to_string(),
            wc2.to_string(),
        ];
        if a.mode == RegionMode::Gaps {
            row.push(gaps.0.to_string());
            row.push(gaps.1.to_string());
        }
        rows.push(row);
    }
    write_records(&a.out, &header, &rows).invalid()?;
    manifest.write(&manifest_path).invalid()?;
    eprintln!("{feasible_count} of {} targets feasible", rows.len());
    Ok(EXIT_OK)
}

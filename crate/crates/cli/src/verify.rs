use bargainlab::spe::{
    automaton_payoffs, certificate_violations, construct_certificate_with,
    one_shot_deviation_scan_with, PayoffTarget, ZChoice,
};
use serde_json::json;

use crate::args::{VerifyArgs, ZPoint};
use crate::config::RunManifest;
use crate::region::market_from;
use crate::run::write_text;
use crate::{Internal, Invalid, Outcome, EXIT_INCOMPLETE, EXIT_OK};

pub fn verify_spe(a: &VerifyArgs) -> Outcome {
    let manifest = RunManifest::new("verify-spe", a).internal()?;
    let mp = market_from(a.market.delta, a.market.tau, a.market.p)?;
    let tgt = PayoffTarget::new(a.w1, a.w2).invalid()?;
    let choice = match a.z {
        ZPoint::Midpoint => ZChoice::Midpoint,
        ZPoint::Lower => ZChoice::Lower,
        ZPoint::Upper => ZChoice::Upper,
    };
    if let Some(out) = &a.out {
        crate::output::ensure_writable(out).invalid()?;
    }
    let cert = construct_certificate_with(&mp, &tgt, choice).invalid()?;
    let violations = certificate_violations(&cert, &mp);
    let deviations = one_shot_deviation_scan_with(&cert, &mp, a.scan_grid, a.tol).internal()?;
    let (wf, wc1, wc2) = automaton_payoffs(&cert, &mp).internal()?;
    let ok = violations.is_empty() && deviations.is_empty();
    let record = json!({
        "manifest": manifest,
        "certificate": cert,
        "certificate_violations": violations,
        "deviations": deviations,
        "automaton_payoffs": { "firm": wf, "c1": wc1, "c2": wc2 },
        "verified": ok,
    });
    let text = serde_json::to_string_pretty(&record).internal()? + "\n";
    match &a.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    if ok {
        eprintln!("certificate verified: no profitable one-shot deviation");
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "certificate not verified: {} constraint violations, {} deviations",
            violations.len(),
            deviations.len()
        );
        Ok(EXIT_INCOMPLETE)
    }
}

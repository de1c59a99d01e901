use std::path::{Path, PathBuf};

use bargainlab::Strategy;
use rayon::prelude::*;

use crate::args::{Aggregation, PayoffOf, SweepArgs};
use crate::config::{parse_strategy, parse_value_set, RunManifest};
use crate::output::{ensure_writable, opt, write_records};
use crate::run::{summarize, write_text, LearnerPair, RunSummary};
use crate::{svg, Failure, Internal, Invalid, Outcome, EXIT_INCOMPLETE, EXIT_OK};

/// All strategies whose round entries come from `values`, round 1 most
/// significant.
fn product(values: &[u32], rounds: usize) -> Vec<Strategy> {
    let mut out = vec![Vec::new()];
    for _ in 0..rounds {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(Strategy::new).collect()
}

fn initials(
    single: &Option<String>,
    values: &Option<String>,
    label: &str,
    pair: &LearnerPair,
    rounding: &mut Vec<String>,
) -> Result<Vec<Strategy>, Failure> {
    let g = pair.game;
    match (single, values) {
        (Some(s), _) => Ok(vec![parse_strategy(
            s,
            g.rounds(),
            g.grid(),
            label,
            rounding,
        )
        .invalid()?]),
        (None, Some(v)) => {
            let mut set = parse_value_set(v, g.grid(), &format!("{label}-values")).invalid()?;
            set.sort_unstable();
            set.dedup();
            Ok(product(&set, g.rounds()))
        }
        (None, None) => Err(anyhow::anyhow!("give either --{label} or --{label}-values")).invalid(),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn sweep(a: &SweepArgs) -> Outcome {
    let mut manifest = RunManifest::new("sweep", a).internal()?;
    let pair = LearnerPair::new(
        &a.game,
        &a.learner,
        &a.alpha_p,
        &a.alpha_r,
        &mut manifest.rounding,
    )?;
    let g = pair.game;
    let props = initials(&a.wp, &a.wp_values, "wp", &pair, &mut manifest.rounding)?;
    let resps = initials(&a.wr, &a.wr_values, "wr", &pair, &mut manifest.rounding)?;
    let (cfg_p, _) = pair.configs(&props[0], &resps[0])?;
    if let Some(w) = cfg_p.rate_warning() {
        eprintln!("warning: {w}");
        manifest.warnings.push(w);
    }
    let agg_path = (a.aggregate != Aggregation::None).then(|| {
        a.agg_out
            .clone()
            .unwrap_or_else(|| with_suffix(&a.out, ".agg.csv"))
    });
    if a.svg.is_some() && a.aggregate == Aggregation::None {
        return Err(anyhow::anyhow!("--svg needs an aggregation")).invalid();
    }
    if a.svg.is_some() && g.rounds() != 2 {
        return Err(anyhow::anyhow!("--svg needs a two-round game")).invalid();
    }
    let manifest_path = a
        .manifest
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".manifest"));
    for p in [
        Some(&a.out),
        agg_path.as_ref(),
        a.svg.as_ref(),
        Some(&manifest_path),
    ]
    .into_iter()
    .flatten()
    {
        ensure_writable(p).invalid()?;
    }

    let cells: Vec<(usize, usize)> = (0..props.len())
        .flat_map(|i| (0..resps.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<RunSummary> = cells
        .par_iter()
        .map(|&(i, j)| {
            let rec = pair.play(&props[i], &resps[j])?;
            summarize(&rec, &g)
        })
        .collect::<Result<_, _>>()?;

    let n = g.rounds();
    let mut header: Vec<String> = Vec::new();
    header.extend((1..=n).map(|k| format!("wp{k}_init")));
    header.extend((1..=n).map(|k| format!("wr{k}_init")));
    for h in [
        "converged",
        "t_converge",
        "ne_round",
        "ne_value",
        "payoff_P",
        "payoff_R",
    ] {
        header.push(h.to_string());
    }
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&results)
        .map(|(&(i, j), s)| {
            let mut row: Vec<String> = props[i]
                .values(g.grid())
                .iter()
                .map(f64::to_string)
                .collect();
            row.extend(resps[j].values(g.grid()).iter().map(f64::to_string));
            row.push(s.converged_at.is_some().to_string());
            row.push(opt(s.converged_at));
            row.push(opt(s.ne_round));
            row.push(opt(s.ne_value));
            row.push(s.payoffs.0.to_string());
            row.push(s.payoffs.1.to_string());
            row
        })
        .collect();
    write_records(&a.out, &header, &rows).invalid()?;

    let unconverged = results.iter().filter(|s| s.converged_at.is_none()).count();
    if unconverged > 0 {
        let w = format!("{unconverged} of {} runs did not converge", results.len());
        eprintln!("warning: {w}");
        manifest.warnings.push(w);
    }

    if let Some(agg_path) = &agg_path {
        let by_proposer = a.aggregate == Aggregation::OverResponder;
        let keys: &[Strategy] = if by_proposer { &props } else { &resps };
        let mut sums = vec![(0.0, 0usize); keys.len()];
        for (&(i, j), s) in cells.iter().zip(&results) {
            let v = match a.payoff {
                PayoffOf::Proposer => s.payoffs.0,
                PayoffOf::Responder => s.payoffs.1,
            };
            let e = &mut sums[if by_proposer { i } else { j }];
            e.0 += v;
            e.1 += 1;
        }
        let means: Vec<f64> = sums.iter().map(|(t, c)| t / *c as f64).collect();
        let cell_y = |s: &Strategy| {
            s.values(g.grid())[1..]
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(";")
        };
        let agg_rows: Vec<Vec<String>> = keys
            .iter()
            .zip(&means)
            .map(|(s, m)| vec![g.value(s.round(1)).to_string(), cell_y(s), m.to_string()])
            .collect();
        let agg_header: Vec<String> = ["cell_x", "cell_y", "mean_payoff"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        write_records(agg_path, &agg_header, &agg_rows).invalid()?;

        if let Some(svg_path) = &a.svg {
            let mut xs: Vec<u32> = keys.iter().map(|s| s.round(1)).collect();
            let mut ys: Vec<u32> = keys.iter().map(|s| s.round(2)).collect();
            xs.sort_unstable();
            xs.dedup();
            ys.sort_unstable();
            ys.dedup();
            ys.reverse();
            let mut grid_vals = vec![vec![f64::NAN; xs.len()]; ys.len()];
            for (s, m) in keys.iter().zip(&means) {
                let c = xs.binary_search(&s.round(1)).unwrap_or(0);
                let r = ys.iter().position(|&y| y == s.round(2)).unwrap_or(0);
                grid_vals[r][c] = *m;
            }
            let d = g.grid();
            let label = |v: &u32| format!("{v}/{d}");
            let agent = if a.aggregate == Aggregation::OverResponder {
                "proposer"
            } else {
                "responder"
            };
            let whose = match a.payoff {
                PayoffOf::Proposer => "proposer",
                PayoffOf::Responder => "responder",
            };
            let doc = svg::heatmap(
                &format!("mean {whose} payoff by {agent} initial strategy"),
                &format!("{agent} round 1"),
                &format!("{agent} round 2"),
                &xs.iter().map(label).collect::<Vec<_>>(),
                &ys.iter().map(label).collect::<Vec<_>>(),
                &grid_vals,
            );
            write_text(svg_path, &doc)?;
        }
    }
    manifest.write(&manifest_path).invalid()?;
    eprintln!(
        "{} runs, {} converged",
        results.len(),
        results.len() - unconverged
    );
    Ok(if unconverged > 0 {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    })
}

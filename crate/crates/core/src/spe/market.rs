use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Slack used when testing constraints that may hold with equality.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Agent types of the one-firm, two-candidate-type market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    Firm,
    C1,
    C2,
}

impl Party {
    pub fn candidates() -> [Party; 2] {
        [Party::C1, Party::C2]
    }

    pub fn is_candidate(self) -> bool {
        self != Party::Firm
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Firm => "f",
            Party::C1 => "c1",
            Party::C2 => "c2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub discount: f64,
    pub optout_cost: f64,
    /// Probability that a firm meets a `c1` candidate.
    pub match_prob: f64,
}

impl MarketParams {
    pub fn new(discount: f64, optout_cost: f64, match_prob: f64) -> Result<Self> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(invalid(format!("discount {discount} must lie in (0, 1)")));
        }
        if !(0.0..=1.0).contains(&optout_cost) {
            return Err(invalid(format!(
                "opt-out cost {optout_cost} must lie in [0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&match_prob) {
            return Err(invalid(format!(
                "match probability {match_prob} must lie in [0, 1]"
            )));
        }
        Ok(MarketParams {
            discount,
            optout_cost,
            match_prob,
        })
    }

    /// Largest opt-out cost for which the equilibrium family exists: `δ²/(1+δ)`.
    pub fn regime_bound(&self) -> f64 {
        regime_bound(self.discount)
    }

    pub fn in_regime(&self) -> bool {
        self.optout_cost <= self.regime_bound() + FEASIBILITY_TOL
    }

    /// Largest share a firm can hold with any candidate type: `G`.
    pub fn upper_share(&self) -> f64 {
        upper_share(self.discount, self.optout_cost)
    }

    /// Lower bound on `w1` given `w2`.
    pub fn w1_floor(&self, w2: f64) -> f64 {
        let (d, t, p) = (self.discount, self.optout_cost, self.match_prob);
        (1.0 - d + 2.0 * t * (1.0 - p) * w2) / (2.0 * (1.0 - t * p))
    }

    /// Lower bound on `w2` given `w1`.
    pub fn w2_floor(&self, w1: f64) -> f64 {
        let (d, t, p) = (self.discount, self.optout_cost, self.match_prob);
        (1.0 - d + 2.0 * t * p * w1) / (2.0 * (1.0 - t * (1.0 - p)))
    }
}

pub fn regime_bound(discount: f64) -> f64 {
    discount * discount / (1.0 + discount)
}

/// `G = (1+δ−2τ)/(2(1−τ))`.
pub fn upper_share(discount: f64, optout_cost: f64) -> f64 {
    (1.0 + discount - 2.0 * optout_cost) / (2.0 * (1.0 - optout_cost))
}

/// `L = (1−δ)/(2(1−τ))`.
pub fn lower_share(discount: f64, optout_cost: f64) -> f64 {
    (1.0 - discount) / (2.0 * (1.0 - optout_cost))
}

/// The firm's expected shares against `c1` and `c2` candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTarget {
    pub w1: f64,
    pub w2: f64,
}

impl PayoffTarget {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        for (name, w) in [("w1", w1), ("w2", w2)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(invalid(format!("{name} = {w} must lie in [0, 1]")));
            }
        }
        Ok(PayoffTarget { w1, w2 })
    }

    pub fn share(&self, candidate: Party) -> f64 {
        match candidate {
            Party::C1 => self.w1,
            Party::C2 => self.w2,
            Party::Firm => panic!("targets are indexed by candidate type"),
        }
    }

    /// Expected payoffs `(W_f, W_c1, W_c2)`.
    pub fn payoffs(&self, mp: &MarketParams) -> (f64, f64, f64) {
        let p = mp.match_prob;
        (
            p * self.w1 + (1.0 - p) * self.w2,
            1.0 - self.w1,
            1.0 - self.w2,
        )
    }
}

/// Names of the constraints the target violates; empty when feasible.
pub fn feasibility_violations(mp: &MarketParams, tgt: &PayoffTarget) -> Vec<String> {
    let mut out = Vec::new();
    if !mp.in_regime() {
        out.push(format!(
            "opt-out cost {} exceeds delta^2/(1+delta) = {:.6}",
            mp.optout_cost,
            mp.regime_bound()
        ));
        return out;
    }
    let g = mp.upper_share();
    for (name, w) in [("w1", tgt.w1), ("w2", tgt.w2)] {
        if w > g + FEASIBILITY_TOL {
            out.push(format!("{name} = {w:.6} exceeds the upper share {g:.6}"));
        }
    }
    let f1 = mp.w1_floor(tgt.w2);
    if tgt.w1 < f1 - FEASIBILITY_TOL {
        out.push(format!("w1 = {:.6} is below its floor {f1:.6}", tgt.w1));
    }
    let f2 = mp.w2_floor(tgt.w1);
    if tgt.w2 < f2 - FEASIBILITY_TOL {
        out.push(format!("w2 = {:.6} is below its floor {f2:.6}", tgt.w2));
    }
    out
}

pub fn theorem1_feasible(mp: &MarketParams, tgt: &PayoffTarget) -> bool {
    feasibility_violations(mp, tgt).is_empty()
}

/// Which point of the admissible interval the firm's first-proposal share takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZChoice {
    #[default]
    Midpoint,
    Lower,
    Upper,
}

/// Parameters of a stationary threat equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub u_f: f64,
    pub u_c1: f64,
    pub u_c2: f64,
    /// Share the firm keeps when it proposes first to a `c_k` candidate.
    pub z_fc1: f64,
    pub z_fc2: f64,
    /// Share a `c_k` candidate keeps when it proposes first.
    pub z_c1f: f64,
    pub z_c2f: f64,
    pub w_f: f64,
    pub w_c1: f64,
    pub w_c2: f64,
}

impl EquilibriumCertificate {
    pub fn u(&self, party: Party) -> f64 {
        match party {
            Party::Firm => self.u_f,
            Party::C1 => self.u_c1,
            Party::C2 => self.u_c2,
        }
    }

    /// First-proposal share kept by `proposer` against `responder`.
    pub fn z(&self, proposer: Party, responder: Party) -> Result<f64> {
        match (proposer, responder) {
            (Party::Firm, Party::C1) => Ok(self.z_fc1),
            (Party::Firm, Party::C2) => Ok(self.z_fc2),
            (Party::C1, Party::Firm) => Ok(self.z_c1f),
            (Party::C2, Party::Firm) => Ok(self.z_c2f),
            _ => Err(invalid(format!(
                "{proposer} and {responder} never bargain with each other"
            ))),
        }
    }

    /// The firm's expected share against `c_k` implied by the proposals.
    pub fn implied_share(&self, candidate: Party) -> f64 {
        let zf = self.z(Party::Firm, candidate).expect("candidate");
        let zc = self.z(candidate, Party::Firm).expect("candidate");
        0.5 * zf + 0.5 * (1.0 - zc)
    }

    /// `(W_f, W_c1, W_c2)` recomputed from the proposals.
    pub fn implied_payoffs(&self, mp: &MarketParams) -> (f64, f64, f64) {
        let (s1, s2) = (self.implied_share(Party::C1), self.implied_share(Party::C2));
        let p = mp.match_prob;
        (p * s1 + (1.0 - p) * s2, 1.0 - s1, 1.0 - s2)
    }

    /// The ordered first-proposer pairings of the market.
    pub fn pairings() -> [(Party, Party); 4] {
        [
            (Party::Firm, Party::C1),
            (Party::C1, Party::Firm),
            (Party::Firm, Party::C2),
            (Party::C2, Party::Firm),
        ]
    }
}

/// Admissible interval for `z_fck`.
pub fn z_interval(mp: &MarketParams, u_f: f64, u_ck: f64, w_k: f64) -> (f64, f64) {
    let d = mp.discount;
    let lo = (1.0 - d + u_f).max(2.0 * w_k - d + u_ck);
    let hi = (1.0 - u_ck).min(2.0 * w_k - u_f);
    (lo, hi)
}

pub fn construct_certificate(
    mp: &MarketParams,
    tgt: &PayoffTarget,
) -> Result<EquilibriumCertificate> {
    construct_certificate_with(mp, tgt, ZChoice::Midpoint)
}

pub fn construct_certificate_with(
    mp: &MarketParams,
    tgt: &PayoffTarget,
    choice: ZChoice,
) -> Result<EquilibriumCertificate> {
    let violations = feasibility_violations(mp, tgt);
    if !violations.is_empty() {
        return Err(Error::Infeasible(violations.join("; ")));
    }
    let tau = mp.optout_cost;
    let (w_f, w_c1, w_c2) = tgt.payoffs(mp);
    let u_f = tau * w_f;
    let u_c1 = tau * w_c1;
    let u_c2 = tau * w_c2;
    let pick = |u_ck: f64, w_k: f64| -> Result<(f64, f64)> {
        let (lo, hi) = z_interval(mp, u_f, u_ck, w_k);
        if lo > hi + FEASIBILITY_TOL {
            return Err(Error::Infeasible(format!(
                "empty proposal interval [{lo:.6}, {hi:.6}] for w = {w_k:.6}"
            )));
        }
        let hi = hi.max(lo);
        let z = match choice {
            ZChoice::Midpoint => 0.5 * (lo + hi),
            ZChoice::Lower => lo,
            ZChoice::Upper => hi,
        };
        Ok((z, 1.0 + z - 2.0 * w_k))
    };
    let (z_fc1, z_c1f) = pick(u_c1, tgt.w1)?;
    let (z_fc2, z_c2f) = pick(u_c2, tgt.w2)?;
    Ok(EquilibriumCertificate {
        u_f,
        u_c1,
        u_c2,
        z_fc1,
        z_fc2,
        z_c1f,
        z_c2f,
        w_f,
        w_c1,
        w_c2,
    })
}

/// Failed equilibrium conditions of a certificate; empty when it certifies
/// a stationary subgame-perfect equilibrium.
pub fn certificate_violations(cert: &EquilibriumCertificate, mp: &MarketParams) -> Vec<String> {
    let d = mp.discount;
    let tol = FEASIBILITY_TOL;
    let mut out = Vec::new();
    for (i, j) in EquilibriumCertificate::pairings() {
        let z = cert.z(i, j).expect("market pairing");
        let (ui, uj) = (cert.u(i), cert.u(j));
        let (lo, hi) = (1.0 - d + ui, 1.0 - uj);
        if z < lo - tol || z > hi + tol {
            out.push(format!("z_{i}{j} = {z:.6} outside [{lo:.6}, {hi:.6}]"));
        }
        if ui > d * d - d * uj + tol {
            out.push(format!("u_{i} = {ui:.6} exceeds delta^2 - delta u_{j}"));
        }
        if uj > d * d - d * ui + tol {
            out.push(format!("u_{j} = {uj:.6} exceeds delta^2 - delta u_{i}"));
        }
    }
    let (wf, wc1, wc2) = cert.implied_payoffs(mp);
    let tau = mp.optout_cost;
    for (party, w) in [(Party::Firm, wf), (Party::C1, wc1), (Party::C2, wc2)] {
        let u = cert.u(party);
        if (u - tau * w).abs() > 1e-12 {
            out.push(format!(
                "u_{party} = {u:.12} differs from tau * W_{party} = {:.12}",
                tau * w
            ));
        }
    }
    out
}

pub fn prop2_check(cert: &EquilibriumCertificate, mp: &MarketParams) -> bool {
    certificate_violations(cert, mp).is_empty()
}

/// `((δ−τ)/(1−τp), (δ−τ)/(1−τ))`: the widest gap between the two candidate
/// types, and the firm–candidate gap at the firm-favouring symmetric target.
pub fn payoff_gaps(mp: &MarketParams) -> (f64, f64) {
    let (d, t, p) = (mp.discount, mp.optout_cost, mp.match_prob);
    ((d - t) / (1.0 - t * p), (d - t) / (1.0 - t))
}

/// The target with `w2` at its ceiling and `w1` at its floor.
pub fn gap_boundary_target(mp: &MarketParams) -> PayoffTarget {
    let w2 = mp.upper_share();
    PayoffTarget {
        w1: mp.w1_floor(w2),
        w2,
    }
}

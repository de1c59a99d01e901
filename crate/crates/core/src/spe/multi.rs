//! Markets with `m` firm types and `n` candidate types.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spe::market::{lower_share, regime_bound, upper_share, FEASIBILITY_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiMarketParams {
    /// Probability that a candidate meets firm type `i`.
    pub p: Vec<f64>,
    /// Probability that a firm meets candidate type `j`.
    pub q: Vec<f64>,
    /// `w[i][j]`: share of firm type `i` against candidate type `j`.
    pub w: Vec<Vec<f64>>,
    pub discount: f64,
    pub optout_cost: f64,
}

fn check_probs(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("{name} must be nonempty")));
    }
    if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(invalid(format!("{name} entries must lie in [0, 1]")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

impl MultiMarketParams {
    pub fn new(
        p: Vec<f64>,
        q: Vec<f64>,
        w: Vec<Vec<f64>>,
        discount: f64,
        optout_cost: f64,
    ) -> Result<Self> {
        check_probs("p", &p)?;
        check_probs("q", &q)?;
        if w.len() != p.len() || w.iter().any(|row| row.len() != q.len()) {
            return Err(invalid(format!(
                "payoff matrix must be {}x{} to match p and q",
                p.len(),
                q.len()
            )));
        }
        if w.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(invalid("payoff matrix entries must lie in [0, 1]"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(invalid(format!("discount {discount} must lie in (0, 1)")));
        }
        if !(0.0..1.0).contains(&optout_cost) {
            return Err(invalid(format!(
                "opt-out cost {optout_cost} must lie in [0, 1)"
            )));
        }
        Ok(MultiMarketParams {
            p,
            q,
            w,
            discount,
            optout_cost,
        })
    }

    pub fn firms(&self) -> usize {
        self.p.len()
    }

    pub fn candidates(&self) -> usize {
        self.q.len()
    }

    pub fn in_regime(&self) -> bool {
        self.optout_cost <= regime_bound(self.discount) + FEASIBILITY_TOL
    }

    /// Expected payoff of firm type `i`.
    pub fn firm_payoff(&self, i: usize) -> f64 {
        self.w[i].iter().zip(&self.q).map(|(w, q)| q * w).sum()
    }

    /// Expected payoff of candidate type `j`.
    pub fn candidate_payoff(&self, j: usize) -> f64 {
        self.w
            .iter()
            .zip(&self.p)
            .map(|(row, p)| p * (1.0 - row[j]))
            .sum()
    }

    /// Upper bound on `w[i][j]`.
    pub fn rhs_upper(&self, i: usize, j: usize) -> f64 {
        let (d, t, p) = (self.discount, self.optout_cost, &self.p);
        let others: f64 = (0..self.firms())
            .filter(|&k| k != i)
            .map(|k| p[k] * (1.0 - self.w[k][j]))
            .sum();
        (1.0 + d - 2.0 * t * p[i] - 2.0 * t * others) / (2.0 * (1.0 - t * p[i]))
    }

    /// Lower bound on `w[i][j]`.
    pub fn rhs_lower(&self, i: usize, j: usize) -> f64 {
        let (d, t, q) = (self.discount, self.optout_cost, &self.q);
        let others: f64 = (0..self.candidates())
            .filter(|&k| k != j)
            .map(|k| q[k] * self.w[i][k])
            .sum();
        (1.0 - d + 2.0 * t * others) / (2.0 * (1.0 - t * q[j]))
    }

    /// Entries `(i, j)` that break a constraint.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.in_regime() {
            out.push(format!(
                "opt-out cost {} exceeds δ²/(1+δ) = {}",
                self.optout_cost,
                regime_bound(self.discount)
            ));
        }
        for i in 0..self.firms() {
            for j in 0..self.candidates() {
                let w = self.w[i][j];
                let hi = self.rhs_upper(i, j);
                let lo = self.rhs_lower(i, j);
                if w > hi + FEASIBILITY_TOL {
                    out.push(format!("w[{i}][{j}] = {w} exceeds its upper bound {hi}"));
                }
                if w < lo - FEASIBILITY_TOL {
                    out.push(format!("w[{i}][{j}] = {w} is below its lower bound {lo}"));
                }
            }
        }
        out
    }
}

pub fn multi_feasible(mmp: &MultiMarketParams) -> bool {
    mmp.violations().is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscriminationMode {
    /// Firms extract more than half from this candidate type and less than
    /// half from the others.
    Candidate(usize),
    /// Every firm gets more than half from every candidate type.
    AllFirms,
}

/// Builds a feasible payoff matrix exhibiting the requested discrimination.
pub fn multi_discriminatory(
    p: &[f64],
    q: &[f64],
    discount: f64,
    optout_cost: f64,
    mode: DiscriminationMode,
) -> Result<MultiMarketParams> {
    let (m, n) = (p.len(), q.len());
    let shell = MultiMarketParams::new(
        p.to_vec(),
        q.to_vec(),
        vec![vec![0.5; n]; m],
        discount,
        optout_cost,
    )?;
    if !shell.in_regime() {
        return Err(Error::Infeasible(format!(
            "opt-out cost {optout_cost} exceeds δ²/(1+δ) = {}",
            regime_bound(discount)
        )));
    }
    let g = upper_share(discount, optout_cost);
    if g <= 0.5 {
        return Err(Error::Infeasible(format!(
            "upper share {g} leaves no room above one half"
        )));
    }
    let v_hi = 0.5 * (0.5 + g);
    let column = match mode {
        DiscriminationMode::AllFirms => vec![v_hi; n],
        DiscriminationMode::Candidate(d) => {
            if d >= n {
                return Err(invalid(format!(
                    "candidate type {d} out of range for {n} types"
                )));
            }
            let t = optout_cost;
            let floor = (1.0 - discount + 2.0 * t * q[d] * v_hi) / (2.0 * (1.0 - t * (1.0 - q[d])));
            let floor = floor.max(lower_share(discount, optout_cost));
            if floor >= 0.5 {
                return Err(Error::Infeasible(format!(
                    "lower bound {floor} leaves no room below one half"
                )));
            }
            let v_lo = 0.5 * (floor + 0.5);
            (0..n).map(|j| if j == d { v_hi } else { v_lo }).collect()
        }
    };
    let out = MultiMarketParams {
        w: vec![column; m],
        ..shell
    };
    let v = out.violations();
    if !v.is_empty() {
        return Err(Error::Infeasible(v.join("; ")));
    }
    Ok(out)
}

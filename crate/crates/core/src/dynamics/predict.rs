//! Closed-form predictions for ℓ1 self-play.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{GameConfig, GridValue, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum G1Class {
    C1,
    C2,
}

/// Predicted single-round trajectory.
///
/// Rows are `(offer, threshold)`:
/// `t = 1`: `(w_p1, w_r1)`; `t = 2`: `(w_r1, min{α_r, w_p1})`; afterwards
/// `(p_min, p_min)` for class C1, while class C2 keeps the proposer at
/// `p_max` until `switch_at`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G1Classification {
    pub p_min: GridValue,
    pub p_max: GridValue,
    pub class: G1Class,
    /// Convergence step from the closed-form table bound: 3 for C1, `t₂′` for C2.
    pub table_t_prime: usize,
    /// Exact first step of the equilibrium run.
    pub predicted_t_prime: usize,
    pub predicted_value: GridValue,
    /// First step at which the proposer leaves `p_max` (C2 only).
    pub switch_at: Option<usize>,
    w_p1: GridValue,
    w_r1: GridValue,
    r2: GridValue,
}

impl G1Classification {
    /// Predicted `(offer, threshold)` at step `t ≥ 1`.
    pub fn predicted_row(&self, t: usize) -> (GridValue, GridValue) {
        match t {
            0 => panic!("steps are 1-based"),
            1 => (self.w_p1, self.w_r1),
            2 => (self.w_r1, self.r2),
            _ => match self.switch_at {
                Some(s) if t < s => (self.p_max, self.p_min),
                _ => (self.p_min, self.p_min),
            },
        }
    }
}

pub fn classify_g1(
    w_p1: GridValue,
    w_r1: GridValue,
    alpha_p: GridValue,
    alpha_r: GridValue,
    rate: f64,
) -> Result<G1Classification> {
    classify_g1_with(w_p1, w_r1, alpha_p, alpha_r, rate, 2.0)
}

/// As [`classify_g1`] with the factor of literal B made explicit: B holds
/// when `1 − p_min > b_factor·(1 − p_max)`.
pub fn classify_g1_with(
    w_p1: GridValue,
    w_r1: GridValue,
    alpha_p: GridValue,
    alpha_r: GridValue,
    rate: f64,
    b_factor: f64,
) -> Result<G1Classification> {
    let d = w_p1.grid;
    for (name, v) in [
        ("w_p1", w_p1),
        ("w_r1", w_r1),
        ("alpha_p", alpha_p),
        ("alpha_r", alpha_r),
    ] {
        if v.grid != d {
            return Err(invalid(format!(
                "{name} is on grid {} but w_p1 is on grid {d}",
                v.grid
            )));
        }
        if v.index == 0 || v.index >= d {
            return Err(Error::OutOfHypothesis(format!(
                "{name} = {v} must be strictly inside (0, 1)"
            )));
        }
    }
    if !(rate > 2.0 * f64::from(d)) {
        return Err(Error::OutOfHypothesis(format!(
            "learning rate {rate} must exceed 2D = {}",
            2 * d
        )));
    }

    let r2 = alpha_r.min(w_p1);
    let p_max = r2.max(w_r1);
    let p_min = r2.min(w_r1);
    let (lo, hi) = (p_min.value(), p_max.value());
    let delta = hi - lo;

    let a = p_min == p_max;
    let b = 1.0 - lo > b_factor * (1.0 - hi) + 1e-12;
    let c = alpha_p == p_min;
    let dd = ((1.0 - lo) - 2.0 * (1.0 - hi)).abs() < 1e-12;
    let class = if a || b || (c && dd) {
        G1Class::C1
    } else {
        G1Class::C2
    };

    let (table_t_prime, switch_at) = match class {
        G1Class::C1 => (3, None),
        G1Class::C2 => {
            let table = ((2.0 * (1.0 - lo) - (1.0 - hi)) / delta + 2.0 / (rate * delta) + 1e-9)
                .floor() as usize
                + 1;
            // the proposer keeps p_max while (1 − p_max) − (t − 2)Δ plus the
            // reference-point bonus stays nonnegative
            let bonus = if alpha_p == p_max {
                2.0 / rate
            } else if alpha_p == p_min {
                -2.0 / rate
            } else {
                0.0
            };
            let bound = 2.0 + ((1.0 - hi) + bonus) / delta;
            let exact = ((bound + 1e-9).floor() as usize + 1).max(3);
            (table, Some(exact))
        }
    };

    let mut out = G1Classification {
        p_min,
        p_max,
        class,
        table_t_prime,
        predicted_t_prime: 0,
        predicted_value: p_min,
        switch_at,
        w_p1,
        w_r1,
        r2,
    };
    let settled = (p_min, p_min);
    let mut t_prime = switch_at.unwrap_or(3);
    while t_prime > 1 && out.predicted_row(t_prime - 1) == settled {
        t_prime -= 1;
    }
    out.predicted_t_prime = t_prime;
    Ok(out)
}

/// Whether a two-round initial condition meets the hypotheses of the
/// two-round convergence result.
pub fn theorem5_preconditions(
    w_p: &Strategy,
    w_r: &Strategy,
    alpha_p: &Strategy,
    alpha_r: &Strategy,
    game: &GameConfig,
) -> Result<bool> {
    if game.rounds() != 2 {
        return Err(invalid(format!(
            "the two-round conditions need rounds = 2, got {}",
            game.rounds()
        )));
    }
    for s in [w_p, w_r, alpha_p, alpha_r] {
        game.check(s)?;
    }
    let v = |s: &Strategy, k: usize| game.value(s.round(k));
    let delta = game.discount();
    let tol = 1e-12;
    Ok(1.0 - v(w_r, 1) >= delta * v(w_r, 2) - tol
        && v(w_p, 1) > delta * (1.0 - v(w_p, 2)) + tol
        && alpha_p.round(1) > w_r.round(1)
        && alpha_r.round(1) > w_p.round(1)
        && f64::from(game.grid()) > 1.0 / (1.0 - delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(i: u32) -> GridValue {
        GridValue::new(i, 8)
    }

    #[test]
    fn equal_initials_are_class_one() {
        for ar in 4..8 {
            for ap in 1..8 {
                let c = classify_g1(gv(4), gv(4), gv(ap), gv(ar), 20.0).unwrap();
                assert_eq!(c.class, G1Class::C1);
                assert_eq!(c.table_t_prime, 3);
                assert_eq!(c.predicted_value, gv(4));
                assert_eq!(c.predicted_t_prime, 1);
            }
        }
    }

    #[test]
    fn table_three_case() {
        let c = classify_g1(gv(6), gv(4), gv(5), gv(7), 20.0).unwrap();
        assert_eq!(c.class, G1Class::C2);
        assert_eq!((c.p_min, c.p_max), (gv(4), gv(6)));
        assert_eq!(c.table_t_prime, 4);
        assert_eq!(c.predicted_t_prime, 4);
        assert_eq!(c.predicted_value, gv(4));
        assert_eq!(c.predicted_row(3), (gv(6), gv(4)));
    }

    #[test]
    fn value_is_minimum_of_three() {
        let c = classify_g1(gv(2), gv(6), gv(3), gv(4), 20.0).unwrap();
        assert_eq!(c.predicted_value, gv(2));
    }

    #[test]
    fn boundary_and_rate_are_out_of_hypothesis() {
        assert!(matches!(
            classify_g1(gv(0), gv(4), gv(4), gv(4), 20.0),
            Err(Error::OutOfHypothesis(_))
        ));
        assert!(matches!(
            classify_g1(gv(4), gv(8), gv(4), gv(4), 20.0),
            Err(Error::OutOfHypothesis(_))
        ));
        assert!(matches!(
            classify_g1(gv(4), gv(4), gv(4), gv(4), 16.0),
            Err(Error::OutOfHypothesis(_))
        ));
    }

    #[test]
    fn literal_b_reading_changes_class() {
        // 1 − p_min = 0.5, 1 − p_max = 0.25
        let two = classify_g1_with(gv(6), gv(4), gv(5), gv(7), 20.0, 2.0).unwrap();
        let one = classify_g1_with(gv(6), gv(4), gv(5), gv(7), 20.0, 1.0).unwrap();
        assert_eq!(two.class, G1Class::C2);
        assert_eq!(one.class, G1Class::C1);
    }

    fn st(v: &[f64]) -> Strategy {
        Strategy::from_values(v, 16).unwrap()
    }

    #[test]
    fn two_round_preconditions() {
        let game = GameConfig::new(2, 0.9, 16).unwrap();
        let half = st(&[0.5, 0.5]);
        let alpha = st(&[0.75, 0.5]);
        assert!(theorem5_preconditions(&half, &half, &alpha, &alpha, &game).unwrap());

        let game10 = GameConfig::new(2, 0.9, 10).unwrap();
        let wr = Strategy::from_values(&[0.1, 0.5], 10).unwrap();
        let wp = Strategy::from_values(&[0.3, 0.5], 10).unwrap();
        let a = Strategy::from_values(&[0.9, 0.5], 10).unwrap();
        assert!(!theorem5_preconditions(&wp, &wr, &a, &a, &game10).unwrap());

        let tight = st(&[0.5, 0.5]);
        assert!(!theorem5_preconditions(&half, &half, &tight, &alpha, &game).unwrap());

        let g1 = GameConfig::new(1, 0.9, 16).unwrap();
        let one = st(&[0.5]);
        assert!(theorem5_preconditions(&one, &one, &one, &one, &g1).is_err());
    }
}

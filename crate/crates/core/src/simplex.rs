//! Euclidean projection onto the probability simplex.

use crate::error::{invalid, Result};

/// Projects `v` onto `{x : x ≥ 0, Σx = 1}` by sorting and thresholding.
///
/// The result satisfies `x_i = max(v_i − θ, 0)` for the unique `θ` making the
/// entries sum to one.
pub fn project_to_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(invalid("cannot project an empty vector onto the simplex"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid("simplex projection requires finite entries"));
    }
    let theta = threshold(v);
    Ok(v.iter().map(|&x| (x - theta).max(0.0)).collect())
}

/// The shift `θ` of the projection.
pub fn threshold(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = sorted[0] - 1.0;
    for (k, &x) in sorted.iter().enumerate() {
        cum += x;
        let candidate = (cum - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

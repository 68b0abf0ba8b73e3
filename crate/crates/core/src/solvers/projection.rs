//! Projection primitives: Euclidean simplex projection and the closed-form
//! halfspace projection for a single coalition constraint.

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{deficit_with_value, NormalizedGame};
use crate::imputation::Imputation;

/// Euclidean projection onto the probability simplex.
///
/// Sort-and-threshold: sort descending, find the largest k with
/// `x_(k) − (Σ_{j<=k} x_(j) − 1)/k > 0`, subtract that threshold and clamp
/// at zero.
pub fn project_simplex(x: &[f64]) -> Result<Imputation> {
    if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    let projected: Vec<f64> = x.iter().map(|&v| (v - theta).max(0.0)).collect();
    Ok(Imputation::new_unchecked(projected))
}

/// Projects `p` onto the halfspace `p(C) >= v(C) − ε`: returns
/// `p + (d_C/|C|)·c`, the identity when the constraint already holds.
pub fn project_halfspace(
    p: &Imputation,
    coalition: &Coalition,
    epsilon: f64,
    game: &NormalizedGame,
) -> Result<Vec<f64>> {
    project_halfspace_with_value(p, coalition, epsilon, game.value(coalition))
}

pub(crate) fn project_halfspace_with_value(
    p: &Imputation,
    coalition: &Coalition,
    epsilon: f64,
    value: f64,
) -> Result<Vec<f64>> {
    if coalition.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    let d = deficit_with_value(p, coalition, epsilon, value);
    let mut out = p.as_slice().to_vec();
    if d > 0.0 {
        let step = d / coalition.size() as f64;
        for i in coalition.members() {
            out[i] += step;
        }
    }
    Ok(out)
}

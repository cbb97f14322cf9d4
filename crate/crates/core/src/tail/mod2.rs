//! Closed-form facts about the mod-2 RDE `X = (ξ + X₁) mod 2`, `P(ξ = 1) = q`.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// One step of the `θ` recursion, `θ′ = θ(2q−1)² + q(1−q)`.
pub fn theta_step(theta: f64, q: f64) -> f64 {
    let s = 2.0 * q - 1.0;
    theta * s * s + q * (1.0 - q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaFixed {
    pub theta: f64,
    pub iterations: usize,
}

/// Steps from `θ = 0` needed to get within `tol` of `1/4` at rate `(2q−1)²`:
/// `⌈log(tol/0.25) / log (2q−1)²⌉`, and 1 when the rate is 0.
pub fn theta_prediction(q: f64, tol: f64) -> usize {
    let rate = (2.0 * q - 1.0).powi(2);
    if rate == 0.0 {
        return 1;
    }
    ((tol / 0.25).ln() / rate.ln()).ceil().max(1.0) as usize
}

/// Iterates [`theta_step`] from `θ = 0`.
///
/// With the contraction rate `ρ = (2q−1)²` known, `ρ/(1−ρ)·|θₙ₊₁ − θₙ|`
/// bounds the distance to the fixed point, and iteration stops once that
/// bound is below `tol`.
pub fn theta_fixed(q: f64, tol: f64) -> Result<ThetaFixed> {
    if q == 0.0 || q == 1.0 {
        return Err(Error::DegenerateParameter(format!(
            "q = {q} gives rate (2q-1)^2 = 1, the recursion does not contract"
        )));
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q must lie in (0, 1), got {q}"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    let rate = (2.0 * q - 1.0).powi(2);
    let factor = rate / (1.0 - rate);
    let mut theta = 0.0;
    let mut iterations = 0;
    loop {
        let next = theta_step(theta, q);
        iterations += 1;
        let done = factor * (next - theta).abs() < tol;
        theta = next;
        if done {
            return Ok(ThetaFixed { theta, iterations });
        }
    }
}

/// `P(X_∅ = Y_∅ⁿ) = 1/2 + (1−2q)^(2n)/2` for two chains that share the
/// boundary at depth `n` and have independent innovations above it.
pub fn mod2_pair_prob(q: f64, n: u32) -> f64 {
    0.5 + (1.0 - 2.0 * q).powi(2 * n as i32) / 2.0
}

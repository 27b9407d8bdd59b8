//! Bernoulli Kullback-Leibler divergence.

use crate::error::{Error, Result};

/// `d_KL(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))` with `0 ln 0 = 0`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} outside (0, 1)")));
    }
    Ok(kl_unchecked(p, q))
}

/// Divergence from a fair coin, `d_KL(p, 1/2)`. Zero at `p = 1/2`.
pub fn kl_from_half(p: f64) -> f64 {
    kl_unchecked(p, 0.5)
}

fn kl_unchecked(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    // clamp tiny negative round-off around p == q
    (term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0)
}

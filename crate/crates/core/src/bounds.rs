//! Analytical quantities for bucketing failure and recursion depth.
//!
//! For a density bounded by `0 < sigma1 <= f <= sigma2`,
//!
//! ```text
//! K = gamma * delta / (2n) - 2 * sigma2 * gamma / (sigma1 * beta)
//! K >= 1  =>  Pr[some bucket holds more than delta keys]
//!                 <= (2n / delta) * exp(-(alpha * K / (2 gamma)) * (1 - 1/K)^2)
//! ```
//!
//! The exponent reaches -1e5 at realistic parameters, so the bound is
//! carried in the log domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub alpha: u64,
    pub beta: u64,
    pub gamma: u64,
    pub delta: u64,
    pub n: u64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl BoundInputs {
    pub fn new(alpha: u64, beta: u64, gamma: u64, delta: u64, n: u64, sigma1: f64, sigma2: f64) -> Result<Self> {
        let inputs = BoundInputs {
            alpha,
            beta,
            gamma,
            delta,
            n,
            sigma1,
            sigma2,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// All four parameters equal to `p`, unit density (uniform on `[0, 1)`).
    pub fn uniform(p: u64, n: u64) -> Self {
        BoundInputs {
            alpha: p,
            beta: p,
            gamma: p,
            delta: p,
            n,
            sigma1: 1.0,
            sigma2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.alpha, self.beta, self.gamma, self.delta, self.n].contains(&0) {
            return Err(Error::invalid("alpha, beta, gamma, delta and n must be positive"));
        }
        if !(self.sigma1 > 0.0 && self.sigma1 <= self.sigma2 && self.sigma2.is_finite()) {
            return Err(Error::invalid(format!(
                "density bounds must satisfy 0 < sigma1 <= sigma2 < inf (got {}, {})",
                self.sigma1, self.sigma2
            )));
        }
        Ok(())
    }
}

pub fn compute_k(inputs: &BoundInputs) -> f64 {
    let gamma = inputs.gamma as f64;
    gamma * inputs.delta as f64 / (2.0 * inputs.n as f64)
        - 2.0 * inputs.sigma2 * gamma / (inputs.sigma1 * inputs.beta as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureBound {
    pub k: f64,
    /// The bound itself; underflows to 0.0 for very negative `ln_value`.
    pub value: f64,
    pub ln_value: f64,
}

/// The failure-probability bound, or `None` when `K < 1` and the bound does
/// not apply. Values above 1 are returned as-is (vacuous but valid).
pub fn failure_bound(inputs: &BoundInputs) -> Option<FailureBound> {
    let k = compute_k(inputs);
    if !(k >= 1.0) {
        return None;
    }
    let alpha = inputs.alpha as f64;
    let gamma = inputs.gamma as f64;
    let shrink = 1.0 - 1.0 / k;
    let ln_value = (2.0 * inputs.n as f64 / inputs.delta as f64).ln() - alpha * k / (2.0 * gamma) * shrink * shrink;
    Some(FailureBound {
        k,
        value: ln_value.exp(),
        ln_value,
    })
}

/// Least `k` with `n^(d^k) < tau`: an upper bound on the number of bucketing
/// levels when every recursed bucket holds fewer than `n^d` keys.
pub fn max_depth_bound(n: u64, d: f64, tau: u64) -> u32 {
    assert!(d > 0.0 && d < 1.0, "d must lie in (0, 1)");
    assert!(tau >= 2, "tau must be at least 2");
    if n < tau {
        return 0;
    }
    let ln_n = (n as f64).ln();
    let ln_tau = (tau as f64).ln();
    let closed = ((ln_n / ln_tau).ln() / (1.0 / d).ln()).ceil().max(0.0) as u32;

    // The closed form misses the boundary n^(d^k) == tau; settle it on the
    // iterated sizes, which is where rounding decides exact powers.
    let size_after = |k: u32| (0..k).fold(n as f64, |s, _| s.powf(d));
    let below = |k: u32| size_after(k) < tau as f64;
    let mut k = closed;
    while !below(k) {
        k += 1;
    }
    while k > 0 && below(k - 1) {
        k -= 1;
    }
    k
}

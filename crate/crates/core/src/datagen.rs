//! Seeded synthetic keys.
//!
//! Uniform draws are `(next_u64 >> 11) * 2^-53` from a SplitMix64 stream.
//! Normal draws use Box–Muller on `(u1, u2)` with `u1 = 1 - u` so the log
//! never sees zero, emitting `r cos(2 pi u2)` then `r sin(2 pi u2)`.
//! Exponential draws use the inverse CDF `-ln(1 - u) / lambda`.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Uniform { min: f64, max: f64 },
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// With probability `peak_fraction` draw from `Uniform(0, peak_width)`,
    /// otherwise from `Uniform(0, 1)`.
    SkewMixture { peak_fraction: f64, peak_width: f64 },
}

impl Distribution {
    pub fn uniform() -> Self {
        Distribution::Uniform { min: 0.0, max: 1.0 }
    }

    pub fn normal() -> Self {
        Distribution::Normal { mu: 0.0, sigma: 1.0 }
    }

    pub fn exponential() -> Self {
        Distribution::Exponential { lambda: 1.0 }
    }

    pub fn lognormal() -> Self {
        Distribution::LogNormal { mu: 0.0, sigma: 1.0 }
    }

    pub fn skew() -> Self {
        Distribution::SkewMixture {
            peak_fraction: 0.5,
            peak_width: 1e-4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Distribution::Uniform { .. } => "uniform",
            Distribution::Normal { .. } => "normal",
            Distribution::Exponential { .. } => "exponential",
            Distribution::LogNormal { .. } => "lognormal",
            Distribution::SkewMixture { .. } => "skew",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { min, max } => min.is_finite() && max.is_finite() && max > min,
            Distribution::Normal { mu, sigma } | Distribution::LogNormal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            Distribution::Exponential { lambda } => lambda > 0.0 && lambda.is_finite(),
            Distribution::SkewMixture {
                peak_fraction,
                peak_width,
            } => peak_fraction > 0.0 && peak_fraction < 1.0 && peak_width > 0.0 && peak_width.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid distribution parameters: {self}")))
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Uniform { min, max } => write!(f, "uniform(min={min}, max={max})"),
            Distribution::Normal { mu, sigma } => write!(f, "normal(mu={mu}, sigma={sigma})"),
            Distribution::Exponential { lambda } => write!(f, "exponential(lambda={lambda})"),
            Distribution::LogNormal { mu, sigma } => write!(f, "lognormal(mu={mu}, sigma={sigma})"),
            Distribution::SkewMixture {
                peak_fraction,
                peak_width,
            } => write!(f, "skew(peak_fraction={peak_fraction}, peak_width={peak_width})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: Distribution,
    pub seed: u64,
}

impl DistributionSpec {
    pub fn new(kind: Distribution, seed: u64) -> Self {
        DistributionSpec { kind, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DistributionSpec { seed, ..self }
    }
}

struct Sampler {
    rng: Rng,
    spare_normal: Option<f64>,
}

impl Sampler {
    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.next_f64();
        let u2 = self.rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    fn draw(&mut self, kind: &Distribution) -> f64 {
        match *kind {
            Distribution::Uniform { min, max } => min + (max - min) * self.rng.next_f64(),
            Distribution::Normal { mu, sigma } => mu + sigma * self.standard_normal(),
            Distribution::LogNormal { mu, sigma } => (mu + sigma * self.standard_normal()).exp(),
            Distribution::Exponential { lambda } => -(1.0 - self.rng.next_f64()).ln() / lambda,
            Distribution::SkewMixture {
                peak_fraction,
                peak_width,
            } => {
                let pick = self.rng.next_f64();
                let u = self.rng.next_f64();
                if pick < peak_fraction {
                    u * peak_width
                } else {
                    u
                }
            }
        }
    }
}

/// `n` i.i.d. draws from `spec`, reproducible from `spec.seed`.
pub fn generate(spec: &DistributionSpec, n: usize) -> Result<Vec<f64>> {
    spec.kind.validate()?;
    let mut sampler = Sampler {
        rng: Rng::new(spec.seed),
        spare_normal: None,
    };
    Ok((0..n).map(|_| sampler.draw(&spec.kind)).collect())
}

/// Fisher–Yates shuffle of a copy of `x`: for `i` from `n - 1` down to 1,
/// swap `i` with a uniform index in `[0, i]`.
pub fn shuffle<T: Clone>(x: &[T], seed: u64) -> Vec<T> {
    let mut out = x.to_vec();
    let mut rng = Rng::new(seed);
    for i in (1..out.len()).rev() {
        let j = rng.index(i + 1);
        out.swap(i, j);
    }
    out
}

//! Piecewise constant CDF model.
//!
//! The key range `[x_min, x_max]` is cut into `beta` equal-width intervals.
//! Interval indices are 1-based: `i(x) = floor((x - x_min) / (x_max - x_min) * beta) + 1`,
//! which lands in `[1, beta + 1]` (only `x_max` itself maps to `beta + 1`).
//! Training stores the prefix counts `b_i = |{j : i(a_j) <= i}|` of the
//! sample `a`; inference returns `b_{i(x)} / alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::Key;
use crate::metering::OpCounter;

/// Interval index `i(x)` for a key in `[x_min, x_max]`, clamped into `[1, beta + 1]`.
pub fn interval_index(x: f64, x_min: f64, x_max: f64, beta: usize) -> Result<usize> {
    check_range(x_min, x_max)?;
    if beta == 0 {
        return Err(Error::invalid("beta must be positive"));
    }
    if !x.is_finite() || x < x_min || x > x_max {
        return Err(Error::OutOfRange {
            key: x,
            min: x_min,
            max: x_max,
        });
    }
    Ok(raw_index(x, x_min, x_max - x_min, beta))
}

fn check_range(x_min: f64, x_max: f64) -> Result<()> {
    if !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::invalid("key range must be finite"));
    }
    if x_min == x_max {
        return Err(Error::DegenerateRange(x_min));
    }
    if x_min > x_max {
        return Err(Error::invalid(format!("x_min {x_min} exceeds x_max {x_max}")));
    }
    Ok(())
}

#[inline]
fn raw_index(x: f64, x_min: f64, range: f64, beta: usize) -> usize {
    let t = ((x - x_min) / range * beta as f64).floor();
    // `as usize` saturates, so t >= 0 keeps the index >= 1.
    (t as usize + 1).min(beta + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcfModel {
    x_min: f64,
    x_max: f64,
    beta: usize,
    alpha: usize,
    /// `prefix_counts[i - 1] = b_i` for `i` in `1..=beta + 1`.
    prefix_counts: Vec<u64>,
    #[serde(skip)]
    range: f64,
}

impl PcfModel {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn prefix_counts(&self) -> &[u64] {
        &self.prefix_counts
    }

    /// `b_i` with the 1-based index used throughout this module.
    pub fn prefix_count(&self, i: usize) -> u64 {
        self.prefix_counts[i - 1]
    }

    /// `F~(x) = b_{i(x)} / alpha`.
    pub fn infer_cdf(&self, x: f64) -> Result<f64> {
        self.check_key(x)?;
        let i = raw_index(x, self.x_min, self.range, self.beta);
        Ok(self.prefix_count(i) as f64 / self.alpha as f64)
    }

    fn check_key(&self, x: f64) -> Result<()> {
        if !x.is_finite() || x < self.x_min || x > self.x_max {
            return Err(Error::OutOfRange {
                key: x,
                min: self.x_min,
                max: self.x_max,
            });
        }
        Ok(())
    }

    /// Interval index of an in-range key, charged as four arithmetic
    /// operations (sub, div, mul, floor), the `+ 1`, and one clamp comparison.
    #[inline]
    pub(crate) fn index_charged(&self, x: f64, counter: &mut OpCounter) -> usize {
        counter.arith(5);
        counter.cmp(1);
        raw_index(x, self.x_min, self.range, self.beta)
    }

    /// Bucket id `floor(F~(x) * gamma) + 1`, clamped into `[1, gamma + 1]`.
    ///
    /// `F~(x) * gamma` is evaluated as the exact integer quotient
    /// `b_{i(x)} * gamma / alpha`, which is the same floor without rounding.
    #[inline]
    pub(crate) fn bucket_charged(&self, x: f64, gamma: usize, counter: &mut OpCounter) -> usize {
        let i = self.index_charged(x, counter);
        counter.read(1);
        let b = self.prefix_counts[i - 1] as u128;
        // div by alpha, mul by gamma, floor, + 1
        counter.arith(4);
        counter.cmp(1);
        let j = (b * gamma as u128 / self.alpha as u128) as usize + 1;
        j.min(gamma + 1)
    }

    /// Rebuilds a model from its serialized parts, checking every invariant.
    pub fn from_parts(x_min: f64, x_max: f64, beta: usize, alpha: usize, prefix_counts: Vec<u64>) -> Result<Self> {
        check_range(x_min, x_max)?;
        if beta == 0 || alpha == 0 {
            return Err(Error::invalid("alpha and beta must be positive"));
        }
        if prefix_counts.len() != beta + 1 {
            return Err(Error::invalid(format!(
                "expected {} prefix counts, got {}",
                beta + 1,
                prefix_counts.len()
            )));
        }
        if prefix_counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("prefix counts must be non-decreasing"));
        }
        if prefix_counts[beta] != alpha as u64 {
            return Err(Error::invalid("last prefix count must equal alpha"));
        }
        Ok(PcfModel {
            x_min,
            x_max,
            beta,
            alpha,
            prefix_counts,
            range: x_max - x_min,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PcfModel = serde_json::from_str(s)?;
        PcfModel::from_parts(raw.x_min, raw.x_max, raw.beta, raw.alpha, raw.prefix_counts)
    }
}

/// Trains the model on `sample` by histogramming interval indices and then
/// taking a prefix sum, `O(alpha + beta)` charged operations in total.
pub fn train_pcf<K: Key>(
    sample: &[K],
    x_min: f64,
    x_max: f64,
    beta: usize,
    counter: &mut OpCounter,
) -> Result<PcfModel> {
    check_range(x_min, x_max)?;
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    if beta == 0 {
        return Err(Error::invalid("beta must be positive"));
    }
    if let Some(bad) = sample
        .iter()
        .map(|k| k.to_real())
        .find(|&x| !x.is_finite() || x < x_min || x > x_max)
    {
        return Err(Error::OutOfRange {
            key: bad,
            min: x_min,
            max: x_max,
        });
    }
    Ok(train_unchecked(sample, x_min, x_max, beta, counter))
}

pub(crate) fn train_unchecked<K: Key>(
    sample: &[K],
    x_min: f64,
    x_max: f64,
    beta: usize,
    counter: &mut OpCounter,
) -> PcfModel {
    let alpha = sample.len();
    let mut model = PcfModel {
        x_min,
        x_max,
        beta,
        alpha,
        prefix_counts: vec![0; beta + 1],
        range: x_max - x_min,
    };
    counter.arith(1);
    counter.assign(beta as u64 + 2);

    let mut hist = std::mem::take(&mut model.prefix_counts);
    for &a in sample {
        counter.loop_step();
        counter.read(1);
        let i = model.index_charged(a.to_real(), counter);
        counter.read(1);
        counter.arith(1);
        counter.assign(1);
        hist[i - 1] += 1;
    }
    counter.cmp(1);

    for i in 1..hist.len() {
        counter.loop_step();
        counter.read(2);
        counter.arith(1);
        counter.assign(1);
        hist[i] += hist[i - 1];
    }
    counter.cmp(1);

    model.prefix_counts = hist;
    model
}

//! Recursive PCF learned sort.
//!
//! Each level with `n >= tau` keys buckets the keys into `gamma + 1`
//! buckets with a freshly trained PCF model, then sorts every bucket:
//! buckets with `|c_j| >= delta` go to the standard sort, the rest recurse.
//! The sorted buckets are concatenated in bucket order.

mod standard;

pub use standard::{standard_sort, StandardSortKind, INSERTION_CUTOFF};

use serde::{Deserialize, Serialize};

use crate::bucketing::{self, bucket_in_range};
use crate::error::{Error, Result};
use crate::key::{find_nan, Key};
use crate::metering::OpCounter;
use crate::rng::{derive_seed, Rng};

pub const DEFAULT_EXPONENT: f64 = 0.75;
pub const DEFAULT_TAU: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortParams {
    pub exp_a: f64,
    pub exp_b: f64,
    pub exp_c: f64,
    pub exp_d: f64,
    pub tau: usize,
    pub fallback: StandardSortKind,
    pub seed: u64,
}

impl Default for SortParams {
    fn default() -> Self {
        SortParams {
            exp_a: DEFAULT_EXPONENT,
            exp_b: DEFAULT_EXPONENT,
            exp_c: DEFAULT_EXPONENT,
            exp_d: DEFAULT_EXPONENT,
            tau: DEFAULT_TAU,
            fallback: StandardSortKind::Quicksort,
            seed: 0,
        }
    }
}

impl SortParams {
    pub fn with_exponents(a: f64, b: f64, c: f64, d: f64) -> Self {
        SortParams {
            exp_a: a,
            exp_b: b,
            exp_c: c,
            exp_d: d,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("a", self.exp_a), ("b", self.exp_b), ("c", self.exp_c), ("d", self.exp_d)] {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::invalid(format!("exponent {name} = {e} is not in (0, 1)")));
            }
        }
        if self.tau < 2 {
            return Err(Error::invalid(format!("tau = {} must be at least 2", self.tau)));
        }
        Ok(())
    }
}

/// Per-level parameters `(alpha, beta, gamma, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelParams {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub delta: usize,
}

/// `floor(n^e)`, tolerant of `powf` landing one ulp under an exact integer
/// (e.g. `10000^0.75`).
pub fn floor_pow(n: usize, e: f64) -> usize {
    let v = (n as f64).powf(e);
    (v * (1.0 + 1e-12)).floor() as usize
}

/// `alpha = max(1, floor(n^a))`, likewise for beta and gamma, and
/// `delta = max(2, floor(n^d))`.
pub fn derive_level_params(n: usize, params: &SortParams) -> LevelParams {
    LevelParams {
        alpha: floor_pow(n, params.exp_a).max(1),
        beta: floor_pow(n, params.exp_b).max(1),
        gamma: floor_pow(n, params.exp_c).max(1),
        delta: floor_pow(n, params.exp_d).max(2),
    }
}

fn derive_level_params_charged(n: usize, params: &SortParams, counter: &mut OpCounter) -> LevelParams {
    counter.pow(4);
    counter.arith(4);
    counter.cmp(4);
    counter.assign(4);
    derive_level_params(n, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortReport<K> {
    pub sorted: Vec<K>,
    /// Operations charged by this call.
    pub ops: OpCounter,
    /// Number of bucketing levels on the deepest path (0 when the root
    /// call never buckets).
    pub max_recursion_depth: usize,
    /// Buckets handed to the standard sort because `|c_j| >= delta`.
    pub failure_fallbacks: u64,
    /// Sub-arrays handed to the standard sort because `n < tau`.
    pub base_case_calls: u64,
}

/// Sorts `x`, charging all work to `counter` as well as to the report.
pub fn learned_sort<K: Key>(x: &[K], params: &SortParams, counter: &mut OpCounter) -> Result<SortReport<K>> {
    params.validate()?;
    if let Some(pos) = find_nan(x) {
        return Err(Error::NanKey(pos));
    }
    let mut driver = Driver {
        params,
        ops: OpCounter::new(),
        failure_fallbacks: 0,
        base_case_calls: 0,
    };
    let (sorted, depth) = driver.sort(x.to_vec(), params.seed);
    counter.absorb(&driver.ops);
    Ok(SortReport {
        sorted,
        ops: driver.ops,
        max_recursion_depth: depth,
        failure_fallbacks: driver.failure_fallbacks,
        base_case_calls: driver.base_case_calls,
    })
}

struct Driver<'a> {
    params: &'a SortParams,
    ops: OpCounter,
    failure_fallbacks: u64,
    base_case_calls: u64,
}

impl Driver<'_> {
    /// Returns the sorted keys and the number of bucketing levels below
    /// and including this call.
    fn sort<K: Key>(&mut self, mut x: Vec<K>, seed: u64) -> (Vec<K>, usize) {
        let n = x.len();
        self.ops.cmp(1);
        if n < self.params.tau {
            self.base_case_calls += 1;
            standard::sort_in_place(&mut x, self.params.fallback, &mut self.ops);
            return (x, 0);
        }

        let (lo, hi) = bucketing::min_max(&x, &mut self.ops).expect("n >= tau >= 2");
        self.ops.cmp(1);
        if !(lo < hi) {
            return (x, 0);
        }
        let (lo, hi) = (lo.to_real(), hi.to_real());
        if lo == hi {
            // Distinct integer keys that share one double; the PCF cannot
            // separate them.
            self.failure_fallbacks += 1;
            standard::sort_in_place(&mut x, self.params.fallback, &mut self.ops);
            return (x, 0);
        }

        let lp = derive_level_params_charged(n, self.params, &mut self.ops);
        let mut rng = Rng::new(seed);
        let (set, _) = bucket_in_range(&x, lo, hi, lp.alpha, lp.beta, lp.gamma, &mut rng, &mut self.ops);
        drop(x);

        let mut out = Vec::with_capacity(n);
        let mut deepest = 0;
        for (j, mut bucket) in set.buckets.into_iter().enumerate() {
            self.ops.loop_step();
            self.ops.read(1);
            self.ops.cmp(1);
            if bucket.len() >= lp.delta {
                self.failure_fallbacks += 1;
                standard::sort_in_place(&mut bucket, self.params.fallback, &mut self.ops);
            } else {
                let (sorted, depth) = self.sort(bucket, derive_seed(seed, &[j as u64]));
                bucket = sorted;
                deepest = deepest.max(depth);
            }
            // concatenate
            self.ops.loop_steps(bucket.len() as u64);
            self.ops.read(bucket.len() as u64);
            self.ops.assign(bucket.len() as u64);
            out.extend_from_slice(&bucket);
        }
        self.ops.cmp(1);
        (out, deepest + 1)
    }
}

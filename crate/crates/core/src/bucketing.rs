//! Model-based bucketing with the PCF model.
//!
//! The full array's min and max define the key range, `alpha` keys are
//! sampled (with replacement) to train the model, and every key is
//! appended to bucket `floor(F~(x) * gamma) + 1`. Because `F~` is
//! non-decreasing, every key of bucket `j` is strictly smaller than every
//! key of any bucket `k > j` that holds a different key value.

use crate::error::{Error, Result};
use crate::key::Key;
use crate::metering::OpCounter;
use crate::pcf::{self, PcfModel};
use crate::rng::Rng;

/// `gamma + 1` order-respecting buckets. `buckets[0]` is bucket `c_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketSet<K> {
    pub buckets: Vec<Vec<K>>,
    pub gamma: usize,
}

impl<K: Key> BucketSet<K> {
    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn max_occupancy(&self) -> usize {
        self.buckets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether some bucket holds more than `delta` keys.
    pub fn overflows(&self, delta: usize) -> bool {
        self.buckets.iter().any(|c| c.len() > delta)
    }

    pub fn concat(&self) -> Vec<K> {
        self.buckets.iter().flatten().copied().collect()
    }
}

/// Draws `alpha` keys uniformly with replacement, or returns the whole
/// array when `alpha >= x.len()`.
pub fn sample_keys<K: Key>(x: &[K], alpha: usize, rng: &mut Rng, counter: &mut OpCounter) -> Result<Vec<K>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alpha == 0 {
        return Err(Error::invalid("alpha must be positive"));
    }
    counter.cmp(1);
    if alpha >= x.len() {
        return Ok(x.to_vec());
    }
    Ok(draw_with_replacement(x, alpha, rng, counter))
}

fn draw_with_replacement<K: Key>(x: &[K], alpha: usize, rng: &mut Rng, counter: &mut OpCounter) -> Vec<K> {
    let mut out = Vec::with_capacity(alpha);
    for _ in 0..alpha {
        counter.loop_step();
        // PRNG draw, multiply-shift to an index, read, write.
        counter.arith(2);
        counter.read(1);
        counter.assign(1);
        out.push(x[rng.index(x.len())]);
    }
    counter.cmp(1);
    out
}

/// Single scan for the minimum and maximum key.
pub fn min_max<K: Key>(x: &[K], counter: &mut OpCounter) -> Result<(K, K)> {
    let (&first, rest) = x.split_first().ok_or(Error::EmptyInput)?;
    counter.read(1);
    counter.assign(2);
    let (mut lo, mut hi) = (first, first);
    for &v in rest {
        counter.loop_step();
        counter.read(1);
        counter.cmp(1);
        if v < lo {
            counter.assign(1);
            lo = v;
        } else {
            counter.cmp(1);
            if v > hi {
                counter.assign(1);
                hi = v;
            }
        }
    }
    counter.cmp(1);
    Ok((lo, hi))
}

/// Buckets `x` into `gamma + 1` buckets using a PCF model trained on
/// `alpha` sampled keys with `beta` intervals.
pub fn model_based_bucketing<K: Key>(
    x: &[K],
    alpha: usize,
    beta: usize,
    gamma: usize,
    rng: &mut Rng,
    counter: &mut OpCounter,
) -> Result<BucketSet<K>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alpha == 0 || beta == 0 || gamma == 0 {
        return Err(Error::invalid("alpha, beta and gamma must be positive"));
    }
    if let Some(pos) = crate::key::find_nan(x) {
        return Err(Error::NanKey(pos));
    }
    let (lo, hi) = min_max(x, counter)?;
    counter.cmp(1);
    if !(lo < hi) {
        return Err(Error::DegenerateRange(lo.to_real()));
    }
    if lo.to_real() == hi.to_real() {
        // Distinct integers that collapse to one double.
        return Err(Error::DegenerateRange(lo.to_real()));
    }
    Ok(bucket_in_range(x, lo.to_real(), hi.to_real(), alpha, beta, gamma, rng, counter).0)
}

/// Bucketing once the range is known to be non-degenerate.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bucket_in_range<K: Key>(
    x: &[K],
    x_min: f64,
    x_max: f64,
    alpha: usize,
    beta: usize,
    gamma: usize,
    rng: &mut Rng,
    counter: &mut OpCounter,
) -> (BucketSet<K>, PcfModel) {
    counter.cmp(1);
    let model = if alpha >= x.len() {
        pcf::train_unchecked(x, x_min, x_max, beta, counter)
    } else {
        let sample = draw_with_replacement(x, alpha, rng, counter);
        pcf::train_unchecked(&sample, x_min, x_max, beta, counter)
    };

    counter.loop_steps(gamma as u64 + 1);
    counter.assign(gamma as u64 + 1);
    let mut buckets: Vec<Vec<K>> = vec![Vec::new(); gamma + 1];

    for &v in x {
        counter.loop_step();
        counter.read(1);
        let j = model.bucket_charged(v.to_real(), gamma, counter);
        counter.assign(1);
        // append
        counter.assign(1);
        counter.read(1);
        buckets[j - 1].push(v);
    }
    counter.cmp(1);

    (BucketSet { buckets, gamma }, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::rng::Rng;

    fn multiset(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    fn check_order(set: &BucketSet<f64>) {
        let nonempty: Vec<&Vec<f64>> = set.buckets.iter().filter(|c| !c.is_empty()).collect();
        for (j, cj) in nonempty.iter().enumerate() {
            for ck in &nonempty[j + 1..] {
                for &p in cj.iter() {
                    for &q in ck.iter() {
                        assert!(p < q, "{p} in earlier bucket is not below {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn small_example_places_one_key_per_bucket() {
        let x = [1.0, 3.0, 5.0, 7.0, 9.0];
        let mut rng = Rng::new(0);
        let mut c = OpCounter::new();
        let set = model_based_bucketing(&x, 5, 4, 4, &mut rng, &mut c).unwrap();
        assert_eq!(set.buckets, vec![vec![1.0], vec![3.0], vec![5.0], vec![7.0], vec![9.0]]);
        assert!(c.total() > 0);
    }

    #[test]
    fn uniform_thousand_respects_order() {
        let mut rng = Rng::new(5);
        let x: Vec<f64> = (0..1000).map(|_| rng.next_f64()).collect();
        let mut c = OpCounter::new();
        let set = model_based_bucketing(&x, 177, 177, 177, &mut rng, &mut c).unwrap();
        assert_eq!(set.len(), 178);
        check_order(&set);
        // Pairwise check via extremes, as an independent formulation.
        let nonempty: Vec<&Vec<f64>> = set.buckets.iter().filter(|b| !b.is_empty()).collect();
        for w in nonempty.windows(2) {
            let max_j = w[0].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min_k = w[1].iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max_j < min_k);
        }
        assert_eq!(multiset(set.concat()), multiset(x));
    }

    #[test]
    fn errors() {
        let mut rng = Rng::new(0);
        let mut c = OpCounter::new();
        assert!(matches!(
            model_based_bucketing(&[2.0, 2.0], 1, 1, 1, &mut rng, &mut c),
            Err(Error::DegenerateRange(_))
        ));
        assert!(matches!(
            model_based_bucketing::<f64>(&[], 1, 1, 1, &mut rng, &mut c),
            Err(Error::EmptyInput)
        ));
        assert!(model_based_bucketing(&[1.0, 2.0], 0, 1, 1, &mut rng, &mut c).is_err());
        assert!(matches!(
            model_based_bucketing(&[1.0, f64::NAN], 1, 1, 1, &mut rng, &mut c),
            Err(Error::NanKey(1))
        ));
    }

    #[test]
    fn bucket_count_is_gamma_plus_one_regardless_of_occupancy() {
        let mut rng = Rng::new(1);
        let mut c = OpCounter::new();
        let set = model_based_bucketing(&[0u64, 1], 2, 2, 50, &mut rng, &mut c).unwrap();
        assert_eq!(set.len(), 51);
        assert_eq!(set.concat(), vec![0, 1]);
    }

    #[test]
    fn sample_examples() {
        let mut rng = Rng::new(4);
        let mut c = OpCounter::new();
        assert_eq!(sample_keys(&[7.0], 3, &mut rng, &mut c).unwrap(), vec![7.0]);
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let a = sample_keys(&x, 10, &mut Rng::new(42), &mut c).unwrap();
        let b = sample_keys(&x, 10, &mut Rng::new(42), &mut c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|k| x.contains(k)));
        assert!(sample_keys::<f64>(&[], 3, &mut rng, &mut c).is_err());
    }

    #[test]
    fn min_max_scan() {
        let mut c = OpCounter::new();
        assert_eq!(min_max(&[3u64, 9, 1, 4], &mut c).unwrap(), (1, 9));
        assert!(min_max::<u64>(&[], &mut c).is_err());
    }

    #[test]
    fn huge_integer_keys_still_partition_in_order() {
        // Spacing 100 at 2^60 (ulp 256): neighbours often share a double.
        let base = 1u64 << 60;
        let x: Vec<u64> = (0..1000u64).rev().map(|i| base + 100 * i).collect();
        let mut c = OpCounter::new();
        let set = model_based_bucketing(&x, 100, 100, 100, &mut Rng::new(2), &mut c).unwrap();
        let nonempty: Vec<&Vec<u64>> = set.buckets.iter().filter(|b| !b.is_empty()).collect();
        for w in nonempty.windows(2) {
            assert!(w[0].iter().max() < w[1].iter().min());
        }
    }

    fn arb_keys() -> impl Strategy<Value = Vec<f64>> {
        prop_oneof![
            prop::collection::vec(0.0f64..1.0, 2..300),
            prop::collection::vec((0u32..20).prop_map(|v| v as f64), 2..300),
            prop::collection::vec(-1e6f64..1e6, 2..300),
        ]
    }

    proptest! {
        #[test]
        fn conservation_and_order(
            x in arb_keys(),
            alpha in 1usize..400,
            beta in 1usize..400,
            gamma in 1usize..400,
            seed in any::<u64>(),
        ) {
            let mut c = OpCounter::new();
            match model_based_bucketing(&x, alpha, beta, gamma, &mut Rng::new(seed), &mut c) {
                Ok(set) => {
                    prop_assert_eq!(set.len(), gamma + 1);
                    check_order(&set);
                    prop_assert_eq!(multiset(set.concat()), multiset(x));
                }
                Err(Error::DegenerateRange(_)) => {
                    prop_assert!(x.iter().all(|&v| v == x[0]));
                }
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}

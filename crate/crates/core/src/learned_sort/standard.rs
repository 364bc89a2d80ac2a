//! Instrumented comparison sorts used for base cases and failed buckets.
//!
//! Quicksort: median-of-three pivot, Hoare partition, insertion sort for
//! slices shorter than [`INSERTION_CUTOFF`]. Introsort adds a heapsort
//! switch once the partition depth exceeds `2 * floor(log2 n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::{find_nan, Key};
use crate::metering::OpCounter;

pub const INSERTION_CUTOFF: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardSortKind {
    #[default]
    Quicksort,
    Introsort,
}

/// Sorts a copy of `x` with the chosen comparison sort.
pub fn standard_sort<K: Key>(x: &[K], kind: StandardSortKind, counter: &mut OpCounter) -> Result<Vec<K>> {
    if let Some(pos) = find_nan(x) {
        return Err(Error::NanKey(pos));
    }
    let mut v = x.to_vec();
    sort_in_place(&mut v, kind, counter);
    Ok(v)
}

pub(crate) fn sort_in_place<K: Key>(v: &mut [K], kind: StandardSortKind, counter: &mut OpCounter) {
    match kind {
        StandardSortKind::Quicksort => quicksort(v, None, counter),
        StandardSortKind::Introsort => {
            let n = v.len().max(1);
            // 2 * floor(log2 n)
            counter.arith(2);
            counter.assign(1);
            let limit = 2 * (usize::BITS - 1 - n.leading_zeros()) as usize;
            quicksort(v, Some(limit), counter)
        }
    }
}

fn quicksort<K: Key>(mut v: &mut [K], mut depth_limit: Option<usize>, counter: &mut OpCounter) {
    loop {
        counter.cmp(1);
        if v.len() < INSERTION_CUTOFF {
            insertion_sort(v, counter);
            return;
        }
        if let Some(limit) = depth_limit.as_mut() {
            counter.cmp(1);
            if *limit == 0 {
                heapsort(v, counter);
                return;
            }
            counter.arith(1);
            counter.assign(1);
            *limit -= 1;
        }

        let split = partition(v, counter);
        let (left, right) = v.split_at_mut(split + 1);
        // Recurse into the shorter side, iterate on the longer one.
        counter.cmp(1);
        counter.assign(1);
        if left.len() < right.len() {
            quicksort(left, depth_limit, counter);
            v = right;
        } else {
            quicksort(right, depth_limit, counter);
            v = left;
        }
    }
}

#[inline]
fn compare_swap<K: Key>(v: &mut [K], i: usize, j: usize, counter: &mut OpCounter) {
    counter.read(2);
    counter.cmp(1);
    if v[j] < v[i] {
        counter.assign(2);
        v.swap(i, j);
    }
}

/// Hoare partition around the median of the first, middle and last keys.
/// Returns `j` such that `v[..=j] <= pivot <= v[j + 1..]`, with both sides
/// non-empty.
fn partition<K: Key>(v: &mut [K], counter: &mut OpCounter) -> usize {
    let last = v.len() - 1;
    counter.arith(2);
    counter.assign(1);
    let mid = last / 2;

    compare_swap(v, 0, mid, counter);
    compare_swap(v, mid, last, counter);
    compare_swap(v, 0, mid, counter);

    counter.read(1);
    counter.assign(3);
    let pivot = v[mid];
    let mut i = 0usize;
    let mut j = last + 1;
    let mut first = true;
    loop {
        // i starts one before the slice on the first pass.
        if first {
            first = false;
        } else {
            counter.arith(1);
            counter.assign(1);
            i += 1;
        }
        loop {
            counter.read(1);
            counter.cmp(1);
            if !(v[i] < pivot) {
                break;
            }
            counter.arith(1);
            counter.assign(1);
            i += 1;
        }
        loop {
            counter.arith(1);
            counter.assign(1);
            j -= 1;
            counter.read(1);
            counter.cmp(1);
            if !(v[j] > pivot) {
                break;
            }
        }
        counter.cmp(1);
        if i >= j {
            return j;
        }
        counter.read(2);
        counter.assign(2);
        v.swap(i, j);
    }
}

pub(crate) fn insertion_sort<K: Key>(v: &mut [K], counter: &mut OpCounter) {
    counter.assign(1);
    for i in 1..v.len() {
        counter.loop_step();
        counter.read(1);
        counter.assign(2);
        let x = v[i];
        let mut j = i;
        loop {
            // j > 0 && v[j - 1] > x
            counter.cmp(1);
            if j == 0 {
                break;
            }
            counter.arith(1);
            counter.read(1);
            counter.cmp(1);
            counter.logic(1);
            if !(v[j - 1] > x) {
                break;
            }
            counter.assign(2);
            counter.arith(1);
            v[j] = v[j - 1];
            j -= 1;
        }
        counter.assign(1);
        v[j] = x;
    }
    counter.cmp(1);
}

fn heapsort<K: Key>(v: &mut [K], counter: &mut OpCounter) {
    let n = v.len();
    counter.arith(1);
    counter.assign(1);
    for start in (0..n / 2).rev() {
        counter.loop_step();
        sift_down(v, start, n, counter);
    }
    counter.cmp(1);
    for end in (1..n).rev() {
        counter.loop_step();
        counter.read(2);
        counter.assign(2);
        v.swap(0, end);
        sift_down(v, 0, end, counter);
    }
    counter.cmp(1);
}

fn sift_down<K: Key>(v: &mut [K], mut root: usize, end: usize, counter: &mut OpCounter) {
    loop {
        counter.arith(2);
        counter.assign(1);
        let mut child = 2 * root + 1;
        counter.cmp(1);
        if child >= end {
            return;
        }
        counter.arith(1);
        counter.cmp(1);
        if child + 1 < end {
            counter.read(2);
            counter.cmp(1);
            counter.logic(1);
            if v[child] < v[child + 1] {
                counter.arith(1);
                counter.assign(1);
                child += 1;
            }
        }
        counter.read(2);
        counter.cmp(1);
        if !(v[root] < v[child]) {
            return;
        }
        counter.assign(3);
        v.swap(root, child);
        root = child;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn selection_sort(mut v: Vec<f64>) -> Vec<f64> {
        for i in 0..v.len() {
            let mut m = i;
            for j in i + 1..v.len() {
                if v[j] < v[m] {
                    m = j;
                }
            }
            v.swap(i, m);
        }
        v
    }

    const KINDS: [StandardSortKind; 2] = [StandardSortKind::Quicksort, StandardSortKind::Introsort];

    #[test]
    fn small_cases() {
        for kind in KINDS {
            let mut c = OpCounter::new();
            assert_eq!(standard_sort(&[2.0, 1.0], kind, &mut c).unwrap(), vec![1.0, 2.0]);
            assert_eq!(standard_sort::<u64>(&[], kind, &mut c).unwrap(), Vec::<u64>::new());
            assert_eq!(standard_sort(&[4u64], kind, &mut c).unwrap(), vec![4]);
        }
    }

    #[test]
    fn sorted_input_is_unchanged() {
        let x: Vec<u64> = (0..1000).collect();
        for kind in KINDS {
            let mut c = OpCounter::new();
            assert_eq!(standard_sort(&x, kind, &mut c).unwrap(), x);
        }
    }

    #[test]
    fn random_array_matches_selection_sort_on_sample() {
        let mut rng = Rng::new(17);
        let x: Vec<f64> = (0..10_000).map(|_| rng.next_f64()).collect();
        for kind in KINDS {
            let mut c = OpCounter::new();
            let sorted = standard_sort(&x, kind, &mut c).unwrap();
            assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
            // The first 200 positions hold the 200 smallest keys.
            let oracle = selection_sort(x.clone());
            assert_eq!(&sorted[..200], &oracle[..200]);
            let idx: Vec<usize> = (0..200).map(|_| rng.index(x.len())).collect();
            let sample: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let resorted = standard_sort(&sample, kind, &mut c).unwrap();
            assert_eq!(resorted, selection_sort(sample));
        }
    }

    #[test]
    fn nan_rejected() {
        let mut c = OpCounter::new();
        assert!(matches!(
            standard_sort(&[1.0, f64::NAN], StandardSortKind::Quicksort, &mut c),
            Err(Error::NanKey(1))
        ));
    }

    #[test]
    fn heapsort_sorts_directly() {
        let mut rng = Rng::new(8);
        let mut v: Vec<u64> = (0..777).map(|_| rng.next_u64() % 50).collect();
        let mut expected = v.clone();
        expected.sort_unstable();
        let mut c = OpCounter::new();
        heapsort(&mut v, &mut c);
        assert_eq!(v, expected);
    }

    /// Median-of-three killer style input: organ pipe.
    #[test]
    fn introsort_bounds_work_on_adversarial_patterns() {
        let n = 1 << 14;
        let organ: Vec<u64> = (0..n / 2).chain((0..n / 2).rev()).collect();
        let mut c = OpCounter::new();
        let out = standard_sort(&organ, StandardSortKind::Introsort, &mut c).unwrap();
        assert!(out.windows(2).all(|w| w[0] <= w[1]));
        let log2n = 14.0;
        assert!((c.total() as f64) < 200.0 * n as f64 * log2n);
    }

    #[test]
    fn quicksort_ops_per_key_grow_like_log_n() {
        let per_key = |n: usize| {
            let mut rng = Rng::new(n as u64);
            let x: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let mut c = OpCounter::new();
            standard_sort(&x, StandardSortKind::Quicksort, &mut c).unwrap();
            c.total() as f64 / n as f64
        };
        let ratio = per_key(1 << 16) / per_key(1 << 8);
        assert!(ratio > 1.5, "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn sorts_like_std(v in prop::collection::vec(0u64..64, 0..500), intro in any::<bool>()) {
            let kind = if intro { StandardSortKind::Introsort } else { StandardSortKind::Quicksort };
            let mut c = OpCounter::new();
            let got = standard_sort(&v, kind, &mut c).unwrap();
            let mut expected = v.clone();
            expected.sort_unstable();
            prop_assert_eq!(got, expected);
        }
    }
}

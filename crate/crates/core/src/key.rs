//! Sortable key types.
//!
//! Ordering between keys always uses the key's own comparison (exact for
//! integers); the real-valued view from [`Key::to_real`] is used only to
//! place keys into PCF intervals. Integer keys above 2^53 lose low bits in
//! that view, which can move a key to a neighbouring interval but never
//! breaks the ordering of the output.

use std::fmt::Debug;

pub trait Key: Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// Position of the key on the real line.
    fn to_real(self) -> f64;

    fn is_nan(self) -> bool {
        false
    }
}

impl Key for u64 {
    #[inline]
    fn to_real(self) -> f64 {
        self as f64
    }
}

impl Key for f64 {
    #[inline]
    fn to_real(self) -> f64 {
        self
    }

    #[inline]
    fn is_nan(self) -> bool {
        f64::is_nan(self)
    }
}

/// Returns the position of the first NaN key, if any.
pub fn find_nan<K: Key>(keys: &[K]) -> Option<usize> {
    keys.iter().position(|k| k.is_nan())
}

/// Maps a float to a `u64` whose unsigned order matches the float order
/// (for non-NaN values). Used to store floating keys in `u64` key files.
pub fn f64_to_ordered_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 0 {
        bits | (1 << 63)
    } else {
        !bits
    }
}

/// Inverse of [`f64_to_ordered_bits`].
pub fn ordered_bits_to_f64(bits: u64) -> f64 {
    if bits >> 63 == 1 {
        f64::from_bits(bits & !(1 << 63))
    } else {
        f64::from_bits(!bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_bits_preserve_order() {
        let xs = [-1e300, -3.5, -0.0, 0.0, 1e-300, 2.0, 7.25, f64::MAX];
        for w in xs.windows(2) {
            assert!(f64_to_ordered_bits(w[0]) <= f64_to_ordered_bits(w[1]));
        }
        for &x in &xs {
            assert_eq!(ordered_bits_to_f64(f64_to_ordered_bits(x)).to_bits(), x.to_bits());
        }
    }

    #[test]
    fn nan_detection() {
        assert_eq!(find_nan(&[1.0, f64::NAN, 2.0]), Some(1));
        assert_eq!(find_nan(&[1u64, 2, 3]), None);
    }
}

//! Learned sorting with a piecewise constant CDF model.
//!
//! The crate provides the recursive learned sort ([`learned_sort`]), its
//! building blocks (the [`pcf`] model and [`bucketing`]), instrumented
//! comparison-sort baselines, an explicit basic-operation counter
//! ([`metering`]), the analytical bucketing-failure and recursion-depth
//! bounds ([`bounds`]), seeded data generation and key-file loaders, and the
//! experiment runners that compare operation counts.
//!
//! ```
//! use pcfsort::{learned_sort, OpCounter, SortParams};
//!
//! let keys = vec![0.7, 0.1, 0.4, 0.9, 0.3];
//! let mut ops = OpCounter::new();
//! let report = learned_sort(&keys, &SortParams::default(), &mut ops).unwrap();
//! assert_eq!(report.sorted, vec![0.1, 0.3, 0.4, 0.7, 0.9]);
//! assert!(ops.total() > 0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bucketing;
pub mod datagen;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod key;
pub mod learned_sort;
pub mod metering;
pub mod pcf;
pub mod rng;

pub use bounds::{compute_k, failure_bound, max_depth_bound, BoundInputs, FailureBound};
pub use bucketing::{model_based_bucketing, sample_keys, BucketSet};
pub use datagen::{generate, shuffle, Distribution, DistributionSpec};
pub use datasets::{load_binary_u64, load_csv_timestamps, subsample, write_binary_u64, KeyFile, KeyFormat};
pub use error::{Error, Result};
pub use key::Key;
pub use learned_sort::{
    derive_level_params, learned_sort, standard_sort, LevelParams, SortParams, SortReport, StandardSortKind,
};
pub use metering::{OpCounter, OpKind, OpSnapshot};
pub use pcf::{interval_index, train_pcf, PcfModel};

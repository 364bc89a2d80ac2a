//! Operation-count experiments.
//!
//! Every trial's seeds are derived from a master seed and the trial's
//! coordinates, trials run in parallel, and results are aggregated in a
//! fixed order, so reruns produce byte-identical output.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::{failure_bound, BoundInputs};
use crate::bucketing::model_based_bucketing;
use crate::datagen::{generate, Distribution, DistributionSpec};
use crate::datasets::subsample;
use crate::error::{Error, Result};
use crate::key::Key;
use crate::learned_sort::{derive_level_params, learned_sort, standard_sort, SortParams, StandardSortKind};
use crate::metering::OpCounter;
use crate::rng::{derive_seed, label_coord, Rng};

const DATA_STREAM: u64 = 0;
const SORT_STREAM: u64 = 1;
const BUCKET_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Learned,
    Quicksort,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Learned => "learned",
            Algorithm::Quicksort => "quicksort",
        }
    }
}

/// Where scaling-experiment keys come from.
#[derive(Debug, Clone)]
pub enum Source {
    Synthetic(DistributionSpec),
    /// Keys loaded from a file; each trial subsamples `n` of them.
    Keys { label: String, keys: Arc<[u64]> },
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Synthetic(spec) => spec.kind.label().to_string(),
            Source::Keys { label, .. } => label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub source: String,
    pub n: usize,
    pub algorithm: Algorithm,
    pub mean_ops_per_n: f64,
    pub std_ops_per_n: f64,
    pub trials: usize,
    pub mean_depth: f64,
    pub failure_fallbacks_mean: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialOutcome {
    ops: u64,
    depth: usize,
    fallbacks: u64,
}

fn run_algorithm<K: Key>(data: &[K], algorithm: Algorithm, params: &SortParams) -> Result<TrialOutcome> {
    let mut counter = OpCounter::new();
    match algorithm {
        Algorithm::Learned => {
            let report = learned_sort(data, params, &mut counter)?;
            debug_assert!(report.sorted.windows(2).all(|w| w[0] <= w[1]));
            Ok(TrialOutcome {
                ops: report.ops.total(),
                depth: report.max_recursion_depth,
                fallbacks: report.failure_fallbacks,
            })
        }
        Algorithm::Quicksort => {
            let sorted = standard_sort(data, StandardSortKind::Quicksort, &mut counter)?;
            debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
            Ok(TrialOutcome {
                ops: counter.total(),
                ..Default::default()
            })
        }
    }
}

fn run_trial(
    source: &Source,
    n: usize,
    trial: usize,
    algorithms: &[Algorithm],
    params: &SortParams,
) -> Result<Vec<TrialOutcome>> {
    let coords = [n as u64, trial as u64];
    let sort_params = SortParams {
        seed: derive_seed(params.seed, &[coords[0], coords[1], SORT_STREAM]),
        ..*params
    };
    match source {
        Source::Synthetic(spec) => {
            let data = generate(&spec.with_seed(derive_seed(spec.seed, &[coords[0], coords[1], DATA_STREAM])), n)?;
            algorithms.iter().map(|&a| run_algorithm(&data, a, &sort_params)).collect()
        }
        Source::Keys { label, keys } => {
            let seed = derive_seed(params.seed, &[label_coord(label), coords[0], coords[1], DATA_STREAM]);
            let data = subsample(keys, n, seed)?;
            algorithms.iter().map(|&a| run_algorithm(&data, a, &sort_params)).collect()
        }
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

fn scaling_records(
    source: &Source,
    n_values: &[usize],
    trials: usize,
    params: &SortParams,
    algorithms: &[Algorithm],
) -> Result<Vec<ScalingRecord>> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if n_values.contains(&0) {
        return Err(Error::invalid("n values must be positive"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n values must be strictly ascending"));
    }
    if let Source::Keys { keys, .. } = source {
        if let Some(&max) = n_values.last() {
            if max > keys.len() {
                return Err(Error::SubsampleTooLarge {
                    requested: max,
                    available: keys.len(),
                });
            }
        }
    }

    let tasks: Vec<(usize, usize)> = n_values
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    let outcomes: Vec<Vec<TrialOutcome>> = tasks
        .par_iter()
        .map(|&(n, t)| run_trial(source, n, t, algorithms, params))
        .collect::<Result<_>>()?;

    let label = source.label();
    let mut records = Vec::new();
    for (i, &n) in n_values.iter().enumerate() {
        let per_n = &outcomes[i * trials..(i + 1) * trials];
        for (a, &algorithm) in algorithms.iter().enumerate() {
            let ops: Vec<f64> = per_n.iter().map(|o| o[a].ops as f64 / n as f64).collect();
            let (mean, std) = mean_std(&ops);
            let depth: Vec<f64> = per_n.iter().map(|o| o[a].depth as f64).collect();
            let fallbacks: Vec<f64> = per_n.iter().map(|o| o[a].fallbacks as f64).collect();
            records.push(ScalingRecord {
                source: label.clone(),
                n,
                algorithm,
                mean_ops_per_n: mean,
                std_ops_per_n: std,
                trials,
                mean_depth: mean_std(&depth).0,
                failure_fallbacks_mean: mean_std(&fallbacks).0,
            });
        }
    }
    Ok(records)
}

/// For each `n`, runs `trials` seeded trials of both the learned sort and
/// plain quicksort on the same fresh data, recording operations per key.
/// Records come out ordered by `n`, learned before quicksort.
pub fn run_scaling_experiment(
    source: &Source,
    n_values: &[usize],
    trials: usize,
    params: &SortParams,
) -> Result<Vec<ScalingRecord>> {
    scaling_records(source, n_values, trials, params, &[Algorithm::Learned, Algorithm::Quicksort])
}

/// Learned sort on `Uniform(0, 1)` and on `SkewMixture(0.5, 1e-4)` at the
/// same `n`; returns `(uniform, skewed)`.
pub fn run_skew_comparison(n: usize, trials: usize, params: &SortParams) -> Result<(ScalingRecord, ScalingRecord)> {
    if n < 10_000 {
        return Err(Error::invalid("skew comparison needs n >= 10^4"));
    }
    let run = |kind: Distribution| -> Result<ScalingRecord> {
        let source = Source::Synthetic(DistributionSpec::new(kind, params.seed));
        let mut r = scaling_records(&source, &[n], trials, params, &[Algorithm::Learned])?;
        Ok(r.remove(0))
    };
    Ok((run(Distribution::uniform())?, run(Distribution::skew())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    A,
    B,
    C,
    D,
}

impl Axis {
    fn slot(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Axis::A),
            "b" => Ok(Axis::B),
            "c" => Ok(Axis::C),
            "d" => Ok(Axis::D),
            _ => Err(Error::invalid(format!("unknown axis {s:?} (expected a, b, c or d)"))),
        }
    }
}

/// A two-axis slice of the exponent space; the other two exponents are held
/// at `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub fixed: f64,
}

pub const DEFAULT_FIXED_EXPONENT: f64 = 0.75;

/// `0.1, 0.2, ..., 0.9`.
pub fn tenths() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_axis: Axis::A,
            y_axis: Axis::B,
            x_values: tenths(),
            y_values: tenths(),
            fixed: DEFAULT_FIXED_EXPONENT,
        }
    }
}

impl GridSpec {
    /// A single cell with all four exponents equal to `e`.
    pub fn point(e: f64) -> Self {
        GridSpec {
            x_values: vec![e],
            y_values: vec![e],
            fixed: e,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_axis == self.y_axis {
            return Err(Error::invalid("grid axes must differ"));
        }
        let all = self.x_values.iter().chain(&self.y_values).chain(std::iter::once(&self.fixed));
        for &v in all {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!("grid exponent {v} is not in (0, 1)")));
            }
        }
        if self.x_values.is_empty() || self.y_values.is_empty() {
            return Err(Error::invalid("grid axes need at least one value"));
        }
        Ok(())
    }

    fn exponents(&self, x: f64, y: f64) -> [f64; 4] {
        let mut e = [self.fixed; 4];
        e[self.x_axis.slot()] = x;
        e[self.y_axis.slot()] = y;
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub empirical_failure_freq: f64,
    /// `ln` of the failure bound; `None` when `K < 1`.
    pub theoretical_bound_ln: Option<f64>,
    pub trials: usize,
    /// Sign of `ln bound - ln 0.5`: -1 where the bound is below one half,
    /// for drawing the 0.5 contour.
    pub bound_side: Option<i8>,
}

/// Bucketing-failure frequency (`some |c_j| > delta`) over an exponent grid,
/// next to the analytical bound for the same parameters.
pub fn run_failure_grid(
    n: usize,
    grid: &GridSpec,
    trials: usize,
    spec: &DistributionSpec,
    sigma1: f64,
    sigma2: f64,
) -> Result<Vec<GridCell>> {
    grid.validate()?;
    spec.kind.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if n < 2 {
        return Err(Error::invalid("grid experiments need n >= 2"));
    }
    // Surface bad sigmas before any work.
    BoundInputs::new(1, 1, 1, 1, n as u64, sigma1, sigma2)?;

    let cells: Vec<(usize, usize)> = (0..grid.y_values.len())
        .flat_map(|iy| (0..grid.x_values.len()).map(move |ix| (ix, iy)))
        .collect();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();

    let failed: Vec<bool> = tasks
        .par_iter()
        .map(|&(c, t)| {
            let (ix, iy) = cells[c];
            let e = grid.exponents(grid.x_values[ix], grid.y_values[iy]);
            let lp = derive_level_params(n, &SortParams::with_exponents(e[0], e[1], e[2], e[3]));
            let coords = [ix as u64, iy as u64, t as u64];
            let data_seed = derive_seed(spec.seed, &[coords[0], coords[1], coords[2], DATA_STREAM]);
            let data = generate(&spec.with_seed(data_seed), n)?;
            let mut rng = Rng::new(derive_seed(spec.seed, &[coords[0], coords[1], coords[2], BUCKET_STREAM]));
            let set = model_based_bucketing(&data, lp.alpha, lp.beta, lp.gamma, &mut rng, &mut OpCounter::new())?;
            Ok(set.overflows(lp.delta))
        })
        .collect::<Result<_>>()?;

    let out = cells
        .iter()
        .enumerate()
        .map(|(c, &(ix, iy))| {
            let e = grid.exponents(grid.x_values[ix], grid.y_values[iy]);
            let lp = derive_level_params(n, &SortParams::with_exponents(e[0], e[1], e[2], e[3]));
            let failures = failed[c * trials..(c + 1) * trials].iter().filter(|&&f| f).count();
            let inputs = BoundInputs {
                alpha: lp.alpha as u64,
                beta: lp.beta as u64,
                gamma: lp.gamma as u64,
                delta: lp.delta as u64,
                n: n as u64,
                sigma1,
                sigma2,
            };
            let ln = failure_bound(&inputs).map(|b| b.ln_value);
            GridCell {
                a: e[0],
                b: e[1],
                c: e[2],
                d: e[3],
                empirical_failure_freq: failures as f64 / trials as f64,
                theoretical_bound_ln: ln,
                trials,
                bound_side: ln.map(|l| {
                    let diff = l - 0.5f64.ln();
                    if diff < 0.0 {
                        -1
                    } else if diff > 0.0 {
                        1
                    } else {
                        0
                    }
                }),
            }
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A record with a fixed CSV layout: one column per field, in declaration
/// order. Missing values are written as `NA`.
pub trait Record: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];

    fn csv_fields(&self) -> Vec<String>;
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

impl Record for ScalingRecord {
    const HEADER: &'static [&'static str] = &[
        "source",
        "n",
        "algorithm",
        "mean_ops_per_n",
        "std_ops_per_n",
        "trials",
        "mean_depth",
        "failure_fallbacks_mean",
    ];

    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.source.clone(),
            self.n.to_string(),
            self.algorithm.label().to_string(),
            self.mean_ops_per_n.to_string(),
            self.std_ops_per_n.to_string(),
            self.trials.to_string(),
            self.mean_depth.to_string(),
            self.failure_fallbacks_mean.to_string(),
        ]
    }
}

impl Record for GridCell {
    const HEADER: &'static [&'static str] = &[
        "a",
        "b",
        "c",
        "d",
        "empirical_failure_freq",
        "theoretical_bound_ln",
        "trials",
        "bound_side",
    ];

    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.a.to_string(),
            self.b.to_string(),
            self.c.to_string(),
            self.d.to_string(),
            self.empirical_failure_freq.to_string(),
            opt(self.theoretical_bound_ln),
            self.trials.to_string(),
            opt(self.bound_side),
        ]
    }
}

pub fn render<R: Record>(records: &[R], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(R::HEADER)?;
            for r in records {
                w.write_record(r.csv_fields())?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(records)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn parse_json<R: Record>(s: &str) -> Result<Vec<R>> {
    Ok(serde_json::from_str(s)?)
}

pub fn emit<R: Record>(records: &[R], path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    let text = render(records, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `<experiment>_<source>_<tag>.<ext>`
pub fn output_file_name(experiment: &str, source: &str, tag: &str, format: OutputFormat) -> String {
    format!("{experiment}_{source}_{tag}.{}", format.extension())
}

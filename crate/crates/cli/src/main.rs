use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pcfsort::experiments::{
    emit, output_file_name, run_failure_grid, run_scaling_experiment, tenths, Axis, GridSpec, OutputFormat, Source,
    DEFAULT_FIXED_EXPONENT,
};
use pcfsort::key::{f64_to_ordered_bits, ordered_bits_to_f64};
use pcfsort::learned_sort::{DEFAULT_EXPONENT, DEFAULT_TAU};
use pcfsort::{
    compute_k, failure_bound, generate, learned_sort, write_binary_u64, BoundInputs, Distribution,
    DistributionSpec, KeyFile, KeyFormat, OpCounter, SortParams, SortReport, StandardSortKind,
};

/// Learned sort with a piecewise constant CDF model, plus operation-count
/// experiments and failure bounds.
#[derive(Parser)]
#[command(author, version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sort a key file and print the sort report as JSON
    Sort(SortCmd),
    /// Generate synthetic keys into a binary key file
    Gen(GenCmd),
    /// Count operations of learned sort and quicksort over several sizes
    Bench(BenchCmd),
    /// Measure bucketing failure frequency over an exponent grid
    FailureGrid(GridCmd),
    /// Evaluate K and the failure bound for explicit parameters
    Bound(BoundCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fallback {
    #[value(alias = "quicksort")]
    Quick,
    #[value(alias = "introsort")]
    Intro,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    Uniform,
    Normal,
    Exponential,
    Lognormal,
    Skew,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Binary,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyType {
    U64,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct SortFlags {
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Base-case threshold: arrays shorter than this go to the standard sort
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: usize,

    /// Sets all four exponents a, b, c, d
    #[arg(long, default_value_t = DEFAULT_EXPONENT)]
    exp: f64,

    /// Sample-size exponent (alpha = n^a)
    #[arg(long)]
    exp_a: Option<f64>,

    /// Interval-count exponent (beta = n^b)
    #[arg(long)]
    exp_b: Option<f64>,

    /// Bucket-count exponent (gamma = n^c)
    #[arg(long)]
    exp_c: Option<f64>,

    /// Bucket-capacity exponent (delta = n^d)
    #[arg(long)]
    exp_d: Option<f64>,

    /// Standard sort for base cases and overfull buckets
    #[arg(long, value_enum, default_value = "quick")]
    fallback: Fallback,
}

impl SortFlags {
    fn params(&self) -> Result<SortParams> {
        let params = SortParams {
            exp_a: self.exp_a.unwrap_or(self.exp),
            exp_b: self.exp_b.unwrap_or(self.exp),
            exp_c: self.exp_c.unwrap_or(self.exp),
            exp_d: self.exp_d.unwrap_or(self.exp),
            tau: self.tau,
            fallback: match self.fallback {
                Fallback::Quick => StandardSortKind::Quicksort,
                Fallback::Intro => StandardSortKind::Introsort,
            },
            seed: self.seed,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
struct DistFlags {
    /// Key distribution
    #[arg(long, value_enum, default_value = "uniform")]
    dist: DistKind,

    /// Uniform lower end
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    min: f64,

    /// Uniform upper end
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    max: f64,

    /// Normal / lognormal location
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,

    /// Normal / lognormal scale
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma: f64,

    /// Exponential rate
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,

    /// Skew: share of keys drawn from the narrow peak
    #[arg(long, default_value_t = 0.5)]
    peak_fraction: f64,

    /// Skew: width of the peak at zero
    #[arg(long, default_value_t = 1e-4)]
    peak_width: f64,
}

impl DistFlags {
    fn distribution(&self) -> Result<Distribution> {
        let d = match self.dist {
            DistKind::Uniform => Distribution::Uniform {
                min: self.min,
                max: self.max,
            },
            DistKind::Normal => Distribution::Normal {
                mu: self.mu,
                sigma: self.sigma,
            },
            DistKind::Exponential => Distribution::Exponential { lambda: self.lambda },
            DistKind::Lognormal => Distribution::LogNormal {
                mu: self.mu,
                sigma: self.sigma,
            },
            DistKind::Skew => Distribution::SkewMixture {
                peak_fraction: self.peak_fraction,
                peak_width: self.peak_width,
            },
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Args)]
struct InputFlags {
    /// Input format
    #[arg(long, value_enum, default_value = "binary")]
    input_format: InputFormat,

    /// Timestamp column for CSV input (0-based)
    #[arg(long, default_value_t = 0)]
    column: usize,
}

impl InputFlags {
    fn key_file(&self, path: &Path) -> KeyFile {
        let format = match self.input_format {
            InputFormat::Binary => KeyFormat::BinaryU64,
            InputFormat::Csv => KeyFormat::CsvTimestamp { column: self.column },
        };
        KeyFile {
            path: path.to_path_buf(),
            format,
        }
    }
}

#[derive(Args)]
struct SortCmd {
    /// Key file to sort
    #[arg(long)]
    input: PathBuf,

    #[command(flatten)]
    input_flags: InputFlags,

    /// How binary keys are interpreted; f64 expects order-preserving bits as written by `gen`
    #[arg(long, value_enum, default_value = "u64")]
    key_type: KeyType,

    #[command(flatten)]
    sort: SortFlags,

    /// Output path for the sorted binary key file [default: sorted_<input stem>.bin]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenCmd {
    #[command(flatten)]
    dist: DistFlags,

    /// Number of keys
    #[arg(long)]
    n: usize,

    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output path [default: keys_<dist>_n<n>_seed<seed>.bin]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    #[command(flatten)]
    dist: DistFlags,

    /// Subsample keys from this file instead of generating them
    #[arg(long)]
    input: Option<PathBuf>,

    #[command(flatten)]
    input_flags: InputFlags,

    /// Array sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,

    /// Trials per size
    #[arg(long, default_value_t = 10)]
    trials: usize,

    #[command(flatten)]
    sort: SortFlags,

    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Output path [default: scaling_<source>_seed<seed>.<ext>]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridCmd {
    #[command(flatten)]
    dist: DistFlags,

    /// Array size
    #[arg(long, default_value_t = 100_000)]
    n: usize,

    /// Trials per cell
    #[arg(long, default_value_t = 30)]
    trials: usize,

    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Exponent varied along x (a, b, c or d)
    #[arg(long, default_value = "a")]
    x_axis: Axis,

    /// Exponent varied along y (a, b, c or d)
    #[arg(long, default_value = "b")]
    y_axis: Axis,

    /// Values for the x exponent, comma separated [default: 0.1,...,0.9]
    #[arg(long, value_delimiter = ',')]
    x_values: Vec<f64>,

    /// Values for the y exponent, comma separated [default: 0.1,...,0.9]
    #[arg(long, value_delimiter = ',')]
    y_values: Vec<f64>,

    /// Value of the two exponents not on an axis
    #[arg(long, default_value_t = DEFAULT_FIXED_EXPONENT)]
    fixed: f64,

    /// Lower density bound used by the analytical bound
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,

    /// Upper density bound used by the analytical bound
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,

    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Output path [default: failure_grid_<dist>_seed<seed>.<ext>]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundCmd {
    /// Sets alpha, beta, gamma and delta at once
    #[arg(long)]
    p: Option<u64>,

    /// Sample size
    #[arg(long)]
    alpha: Option<u64>,

    /// Number of PCF intervals
    #[arg(long)]
    beta: Option<u64>,

    /// Number of buckets
    #[arg(long)]
    gamma: Option<u64>,

    /// Bucket capacity
    #[arg(long)]
    delta: Option<u64>,

    /// Array size
    #[arg(long)]
    n: u64,

    /// Lower density bound
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,

    /// Upper density bound
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
}

fn report_json<K>(report: &SortReport<K>, out: &Path) -> serde_json::Value {
    json!({
        "n": report.sorted.len(),
        "ops": report.ops,
        "max_recursion_depth": report.max_recursion_depth,
        "failure_fallbacks": report.failure_fallbacks,
        "base_case_calls": report.base_case_calls,
        "output": out,
    })
}

fn cmd_sort(cmd: SortCmd) -> Result<()> {
    let params = cmd.sort.params()?;
    if matches!((cmd.key_type, cmd.input_flags.input_format), (KeyType::F64, InputFormat::Csv)) {
        bail!("--key-type f64 only applies to binary input");
    }
    let out = cmd.out.clone().unwrap_or_else(|| {
        let stem = cmd.input_flags.key_file(&cmd.input).label();
        PathBuf::from(format!("sorted_{stem}.bin"))
    });
    let keys = cmd.input_flags.key_file(&cmd.input).load()?;
    let mut counter = OpCounter::new();
    let summary = match cmd.key_type {
        KeyType::U64 => {
            let report = learned_sort(&keys, &params, &mut counter)?;
            write_binary_u64(&out, &report.sorted)?;
            report_json(&report, &out)
        }
        KeyType::F64 => {
            let reals: Vec<f64> = keys.iter().map(|&b| ordered_bits_to_f64(b)).collect();
            let report = learned_sort(&reals, &params, &mut counter)?;
            let bits: Vec<u64> = report.sorted.iter().map(|&x| f64_to_ordered_bits(x)).collect();
            write_binary_u64(&out, &bits)?;
            report_json(&report, &out)
        }
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_gen(cmd: GenCmd) -> Result<()> {
    let dist = cmd.dist.distribution()?;
    let out = cmd
        .out
        .unwrap_or_else(|| PathBuf::from(format!("keys_{}_n{}_seed{}.bin", dist.label(), cmd.n, cmd.seed)));
    let keys = generate(&DistributionSpec::new(dist, cmd.seed), cmd.n)?;
    let bits: Vec<u64> = keys.iter().map(|&x| f64_to_ordered_bits(x)).collect();
    write_binary_u64(&out, &bits)?;
    eprintln!("wrote {} keys to {}", cmd.n, out.display());
    Ok(())
}

fn cmd_bench(cmd: BenchCmd) -> Result<()> {
    let params = cmd.sort.params()?;
    if cmd.trials == 0 {
        bail!("--trials must be positive");
    }
    let source = match &cmd.input {
        Some(path) => {
            let file = cmd.input_flags.key_file(path);
            let keys = file.load()?;
            Source::Keys {
                label: file.label(),
                keys: Arc::from(keys),
            }
        }
        None => Source::Synthetic(DistributionSpec::new(cmd.dist.distribution()?, cmd.sort.seed)),
    };
    let format = OutputFormat::from(cmd.format);
    let out = cmd.out.unwrap_or_else(|| {
        PathBuf::from(output_file_name(
            "scaling",
            &source.label(),
            &format!("seed{}", cmd.sort.seed),
            format,
        ))
    });
    let records = run_scaling_experiment(&source, &cmd.n, cmd.trials, &params)?;
    emit(&records, &out, format)?;
    eprintln!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

fn cmd_failure_grid(cmd: GridCmd) -> Result<()> {
    let dist = cmd.dist.distribution()?;
    let or_tenths = |v: Vec<f64>| if v.is_empty() { tenths() } else { v };
    let grid = GridSpec {
        x_axis: cmd.x_axis,
        y_axis: cmd.y_axis,
        x_values: or_tenths(cmd.x_values),
        y_values: or_tenths(cmd.y_values),
        fixed: cmd.fixed,
    };
    grid.validate()?;
    let format = OutputFormat::from(cmd.format);
    let out = cmd.out.unwrap_or_else(|| {
        PathBuf::from(output_file_name(
            "failure_grid",
            dist.label(),
            &format!("seed{}", cmd.seed),
            format,
        ))
    });
    let spec = DistributionSpec::new(dist, cmd.seed);
    let cells = run_failure_grid(cmd.n, &grid, cmd.trials, &spec, cmd.sigma1, cmd.sigma2)?;
    emit(&cells, &out, format)?;
    eprintln!("wrote {} cells to {}", cells.len(), out.display());
    Ok(())
}

fn cmd_bound(cmd: BoundCmd) -> Result<()> {
    let pick = |v: Option<u64>, name: &str| {
        v.or(cmd.p)
            .with_context(|| format!("--{name} is required unless --p is given"))
    };
    let inputs = BoundInputs::new(
        pick(cmd.alpha, "alpha")?,
        pick(cmd.beta, "beta")?,
        pick(cmd.gamma, "gamma")?,
        pick(cmd.delta, "delta")?,
        cmd.n,
        cmd.sigma1,
        cmd.sigma2,
    )?;
    let k = compute_k(&inputs);
    let out = match failure_bound(&inputs) {
        Some(b) => json!({ "K": k, "bound": b.value, "ln_bound": b.ln_value, "applicable": true }),
        None => json!({ "K": k, "bound": null, "ln_bound": null, "applicable": false }),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sort(c) => cmd_sort(c),
        Command::Gen(c) => cmd_gen(c),
        Command::Bench(c) => cmd_bench(c),
        Command::FailureGrid(c) => cmd_failure_grid(c),
        Command::Bound(c) => cmd_bound(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "hhscaling", version, about = "Hilbert-Huang scaling and complexity measures")]
pub struct Cli {
    /// Worker threads for ensembles and reference bands.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Plain-text `key=value` file; keys are flag names without dashes.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate reference paths, or one ensemble row with --ensemble.
    Simulate(SimulateArgs),
    /// Empirical mode decomposition of a series.
    Decompose(DecomposeArgs),
    /// Instantaneous amplitudes, frequencies and periods of every IMF.
    Spectral(SpectralArgs),
    /// Time-dependent scaling exponent H*(t).
    Scaling(ScalingArgs),
    /// Time-dependent complexity C*(t).
    Complexity(ComplexityArgs),
    /// Intraday panels, day-mean profiles and Brownian reference bands.
    Intraday(IntradayArgs),
    /// Ensemble table over a grid of scaling exponents.
    Table(TableArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Decompose(_) => "decompose",
            Command::Spectral(_) => "spectral",
            Command::Scaling(_) => "scaling",
            Command::Complexity(_) => "complexity",
            Command::Intraday(_) => "intraday",
            Command::Table(_) => "table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Bm,
    Fbm,
    Slm,
    Arfima,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Squared,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Hstar,
    Cstar,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct InputArgs {
    /// Input CSV file.
    #[arg(value_name = "FILE")]
    #[serde(skip)]
    pub file: Option<PathBuf>,
    /// Input CSV file, for config files.
    #[arg(long = "input", value_name = "FILE")]
    #[serde(skip)]
    pub input: Option<PathBuf>,
    /// Value column of a series file; defaults to the last column.
    #[arg(long)]
    pub value_col: Option<String>,
    /// Read the input as date/time/price rows and analyse log-prices.
    #[arg(long)]
    pub prices: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub schema: SchemaArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SchemaArgs {
    #[arg(long, default_value = "date")]
    pub date_col: String,
    #[arg(long, default_value = "time")]
    pub time_col: String,
    #[arg(long, default_value = "price")]
    pub price_col: String,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Nominal bar spacing in seconds; 0 disables carry-forward filling.
    #[arg(long, default_value_t = 30)]
    pub sample_interval: i64,
    /// Gaps longer than this many seconds start a new session.
    #[arg(long, default_value_t = 1800)]
    pub session_gap: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EmdArgs {
    /// Use the SD stopping criterion with this threshold.
    #[arg(long)]
    pub sd_threshold: Option<f64>,
    #[arg(long)]
    pub max_imfs: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub max_sift_iterations: usize,
    #[arg(long, default_value_t = 2)]
    pub mirror_extrema: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub process: ProcessKind,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Defaults to 10384 for slm and 10000 otherwise.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// Emit one ensemble row instead of raw paths.
    #[arg(long)]
    pub ensemble: bool,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
    #[arg(long, default_value_t = 19)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 128)]
    pub slm_m: u64,
    #[arg(long, default_value_t = 6000)]
    pub slm_big_m: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectralArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ScalingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
    /// Trailing window for the rolling exponent.
    #[arg(long)]
    pub rolling_window: Option<usize>,
    /// Largest lag of the GHE(q=1) fit in the summary.
    #[arg(long, default_value_t = 19)]
    pub tau_max: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ComplexityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
    #[arg(long, value_enum, default_value_t = WeightKind::Squared)]
    pub weight: WeightKind,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct IntradayArgs {
    #[arg(value_name = "FILE")]
    #[serde(skip)]
    pub file: Option<PathBuf>,
    #[arg(long = "input", value_name = "FILE")]
    #[serde(skip)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
    #[arg(long, value_enum, default_value_t = MeasureKind::Hstar)]
    pub measure: MeasureKind,
    #[arg(long, default_value_t = 100)]
    pub band_sims: usize,
    /// Also compute the Brownian band for C*.
    #[arg(long)]
    pub cstar_band: bool,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
    #[arg(long, value_enum, default_value_t = WeightKind::Squared)]
    pub weight: WeightKind,
    /// Trailing window for the rolling exponent.
    #[arg(long)]
    pub rolling_window: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub process: ProcessKind,
    /// `start:stop:step` grid of target exponents H.
    #[arg(long, default_value = "0.1:0.9:0.1")]
    pub h_grid: String,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    /// Defaults to 10384 for slm and 10000 otherwise.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub trim_fraction: f64,
    #[arg(long, default_value_t = 19)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 128)]
    pub slm_m: u64,
    #[arg(long, default_value_t = 6000)]
    pub slm_big_m: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub emd: EmdArgs,
}

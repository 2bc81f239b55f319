use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tforder::{OrderStatSpec, ReferenceDistribution, ShapeClass};

#[derive(Debug, Parser)]
#[command(
    name = "tforder",
    version,
    about = "Stochastic orders and exceedance bounds for order statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,

    /// Output format; defaults to csv for tables and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Violation threshold for oracle margins.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub probe_tol: f64,

    /// Seed for Monte Carlo probes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Icv,
    Icx,
    Ss,
    St,
    /// compare `E X_{i:n}` with the parent mean
    Mean,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Check a sufficient condition for `X_{i:n} >= X_{j:m}`.
    Compare(CompareArgs),
    /// Star-shaped comparability map over all `(i, j)`.
    Region(RegionArgs),
    /// Table of `p^G_{i:n}` for `i = 1..n`.
    BoundsTable(BoundsTableArgs),
    /// Star-shaped check with full diagnostics.
    VerifySs(VerifySsArgs),
    /// ECDF plug-in interval for `E X_{i:n}` from a one-column CSV.
    DataInterval(DataIntervalArgs),
    /// Numerical probe of an order between two transformed order statistics.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "class", value_parser = parse_class)]
    pub class: ShapeClass,
    #[arg(long, value_parser = parse_spec)]
    pub a: OrderStatSpec,
    #[arg(long, value_parser = parse_spec)]
    pub b: Option<OrderStatSpec>,
    /// Defaults to the order implied by the class.
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long)]
    pub with_oracle: bool,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long = "class", value_parser = parse_class)]
    pub class: ShapeClass,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    /// Also write the boundary lines as CSV (`series,i,j`).
    #[arg(long)]
    pub lines: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsTableArgs {
    #[arg(long)]
    pub n: u32,
    /// Reference distributions (repeatable); defaults to LL, E, U, E-.
    #[arg(long = "g", value_parser = parse_g, allow_hyphen_values = true)]
    pub gs: Vec<ReferenceDistribution>,
}

#[derive(Debug, Args)]
pub struct VerifySsArgs {
    #[arg(long = "class", value_parser = parse_class)]
    pub class: ShapeClass,
    #[arg(long, value_parser = parse_spec)]
    pub a: OrderStatSpec,
    #[arg(long, value_parser = parse_spec)]
    pub b: OrderStatSpec,
    #[arg(long)]
    pub with_oracle: bool,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct DataIntervalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub i: u32,
    #[arg(long, value_parser = parse_class)]
    pub lower: ShapeClass,
    #[arg(long, value_parser = parse_class)]
    pub upper: ShapeClass,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub order: OrderArg,
    #[arg(long = "g", value_parser = parse_g, allow_hyphen_values = true)]
    pub g: ReferenceDistribution,
    #[arg(long, value_parser = parse_spec)]
    pub a: OrderStatSpec,
    #[arg(long, value_parser = parse_spec)]
    pub b: OrderStatSpec,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Add paired Monte Carlo estimates for star-shaped test functions.
    #[arg(long)]
    pub mc_samples: Option<usize>,
}

fn parse_spec(s: &str) -> Result<OrderStatSpec, String> {
    s.parse().map_err(|e: tforder::Error| e.to_string())
}

fn parse_class(s: &str) -> Result<ShapeClass, String> {
    s.parse().map_err(|e: tforder::Error| e.to_string())
}

fn parse_g(s: &str) -> Result<ReferenceDistribution, String> {
    s.parse().map_err(|e: tforder::Error| e.to_string())
}

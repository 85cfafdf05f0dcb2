use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "lattice-area", version, about = "Area statistics of lattice paths and column-convex polygons")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML config file; flags given on the command line take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Memory cap for exact tables, in bytes or with a K/M/G suffix
    #[arg(long, global = true)]
    pub memory_budget: Option<String>,
    /// Maximum number of worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Drift, period, structural constants and drift regime of a step set
    Analyze(StepArgs),
    /// Exact (area, final altitude) distribution for each requested length
    Enumerate(EnumerateArgs),
    /// Exact raw moment sums of area and final altitude for all lengths up to m
    Moments(MomentArgs),
    /// Limiting moments or the underlying recursion tables
    Limits(LimitArgs),
    /// Kernel-method numerics
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Column-convex polygons
    #[command(subcommand)]
    Polyomino(PolyominoCommand),
    /// Rescaled moments against their limits
    Converge(ConvergeArgs),
    /// Run the invariant suite and print a pass/fail matrix
    Selftest,
}

#[derive(Args, Debug, Default)]
pub struct StepArgs {
    /// Step set, e.g. "-1:1,0:1,1:1" (step:weight), or a JSON object with --steps-format json
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<String>,
    #[arg(long, value_parser = ["compact", "json"])]
    pub steps_format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub steps: StepArgs,
    /// excursion, meander, bridge or walk
    #[arg(long)]
    pub class: Option<String>,
    /// Path lengths
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
}

#[derive(Args, Debug, Default)]
pub struct MomentArgs {
    #[command(flatten)]
    pub steps: StepArgs,
    #[arg(long)]
    pub class: Option<String>,
    /// Largest path length
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Largest area order
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest altitude order
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct LimitArgs {
    /// bea, bma, meander, walk-signed, walk-abs or rayleigh
    #[arg(long)]
    pub kind: Option<String>,
    /// Print a recursion table instead: k, q, c, qnt, dk, dpm, lpm or labs
    #[arg(long)]
    pub table: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum KernelCommand {
    /// Structural constants (tau, rho, beta) and drift regime
    Profile(StepArgs),
    /// Small and large roots of the kernel equation at each z
    Branches(KernelPointArgs),
    /// Boundary series G_k(z), and F(z,1,u) at the requested u
    Solve(KernelPointArgs),
    /// Assumption audit on a grid of z values
    Assumptions(KernelGridArgs),
    /// Square-root behaviour of u_1 near rho
    Puiseux(KernelGridArgs),
}

#[derive(Args, Debug, Default)]
pub struct KernelPointArgs {
    #[command(flatten)]
    pub steps: StepArgs,
    #[arg(long, value_delimiter = ',')]
    pub z: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub u: Option<Vec<f64>>,
}

#[derive(Args, Debug, Default)]
pub struct KernelGridArgs {
    #[command(flatten)]
    pub steps: StepArgs,
    /// a:b:n, n points strictly inside (a, b)
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum PolyominoCommand {
    /// Counts by half-perimeter and area
    Enumerate(HpMaxArgs),
    /// Raw area moment sums by half-perimeter
    Moments(HpMaxArgs),
    /// Rescaled mean area against the Brownian excursion area mean
    Converge(HpListArgs),
    /// Critical point (rho, tau) and beta
    Profile,
    /// Brute-force counts from fixed polyomino enumeration
    Brute(AreaArgs),
}

#[derive(Args, Debug, Default)]
pub struct HpMaxArgs {
    #[arg(long)]
    pub hp_max: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct HpListArgs {
    #[arg(long, value_delimiter = ',')]
    pub hp: Option<Vec<usize>>,
}

#[derive(Args, Debug, Default)]
pub struct AreaArgs {
    #[arg(long)]
    pub area_max: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub steps: StepArgs,
    #[arg(long)]
    pub class: Option<String>,
    /// Ascending path lengths
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// n:t pairs, or k:l:t triples with --signed
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<String>>,
    /// Signed areas of simple walks (the step set is fixed to -1:1,1:1)
    #[arg(long)]
    pub signed: bool,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "simplezero", version, about = "L-functions of holomorphic newforms: evaluation and verification")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Read the newform from a text file.
    #[arg(long, global = true, conflicts_with = "delta", value_name = "PATH")]
    pub newform: Option<PathBuf>,
    /// Use the built-in discriminant form Δ.
    #[arg(long, global = true)]
    pub delta: bool,
    /// Number of coefficients to build or keep.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub nmax: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Quadrature and series tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient tables a(n), c(n) or ℓ(n).
    Coeffs(CoeffsArgs),
    /// Critical-line zeros with certification.
    Zeros(ZerosArgs),
    /// Local Euler factors, their zeros and pole inheritance.
    Local(LocalArgs),
    /// Additive twists L_f(s, α), D_f(s, α) and the character expansion.
    Twist(TwistArgs),
    /// Run verification suites and emit a report.
    Verify(VerifyArgs),
    /// Rankin–Selberg average and Deligne abundance.
    Rankin(RankinArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffSeries {
    /// a(n)
    A,
    /// c(n), the coefficients of D_f
    C,
    /// ℓ(n), the coefficients of log L_f
    L,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum, default_value_t = CoeffSeries::A)]
    pub series: CoeffSeries,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Also write (t, Z(t)) samples as CSV.
    #[arg(long, value_name = "PATH")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalArgs {
    /// Prime q ∤ N.
    #[arg(long)]
    pub q: Option<u64>,
    /// Ordinate range [0, tmax] for listed local zeros.
    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,
    /// Fit the pole of D_f(s, 1/q) at the first local zero.
    #[arg(long, requires = "q")]
    pub inherit: bool,
    /// Report the Rankin–Selberg average instead.
    #[arg(long)]
    pub rankin: bool,
    #[arg(long = "X", default_value_t = 10_000)]
    pub x: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TwistSeries {
    L,
    D,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    /// Rational α, e.g. 1/3.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Evaluate D_f(s, 1/q) through characters instead.
    #[arg(long, conflicts_with = "alpha")]
    pub q: Option<u64>,
    /// Re s.
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    /// Im s.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = TwistSeries::D)]
    pub series: TwistSeries,
    /// Refuse when the rigorous tail bound exceeds this.
    #[arg(long, default_value_t = 1.0)]
    pub tail_tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run, or `all`.
    #[arg(long, required = true, num_args = 1..)]
    pub suite: Vec<String>,
    /// Cusp α for every suite (default 3/10 for the identity, 1/3 for the expansion).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long, num_args = 1..)]
    pub q: Option<Vec<u64>>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    #[arg(long = "X")]
    pub x: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RankinArgs {
    #[arg(long = "X", default_value_t = 10_000)]
    pub x: u64,
}

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "awq", version, about = "Askey-Wilson polynomials, q-Gaussian densities and conditional moments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a polynomial family, density or moment on a grid.
    Eval(EvalArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Compare expansion partial sums with the closed-form density.
    Expand(ExpandArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

/// Parameters shared by `eval` and `expand`.
#[derive(Args, Debug, Clone)]
pub struct Params {
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub z: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub rho1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub rho2: f64,
    /// Evaluation points (repeatable).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    pub x: Vec<f64>,
    /// Inclusive grid `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Relative truncation tolerance for infinite products and series.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Cap on the number of terms of any truncated product or series.
    #[arg(long)]
    pub max_terms: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// One of h, H, Q, P, B, b, U, D, A, f_N, f_CN, phi, C.
    pub selector: String,
    /// Degree.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpandTarget {
    /// the conditional density `phi` and its `H_i(x)` expansion
    Phi,
    /// `f_CN` and the Poisson-Mehler sum
    #[value(name = "f_CN")]
    FCn,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(value_enum, default_value_t = ExpandTarget::Phi)]
    pub target: ExpandTarget,
    /// Number of expansion terms.
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run every check (the default when no --check is given).
    #[arg(long)]
    pub all: bool,
    /// Check names, repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Values of q replacing the default grid (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Pass threshold overriding the per-check defaults.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tightframe", version, about = "Tight frames from multivariate Hahn and Krawtchouk polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a frame and write it as JSON or CSV.
    Gen(GenArgs),
    /// Check that a frame file is tight, and report norms and Gram identities.
    Verify(VerifyArgs),
    /// Evaluate a polynomial or kernel at a point.
    Eval(EvalArgs),
    /// Rebuild the bundled example matrices and compare.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    Xi,
    Hahn,
    Kraw,
    Combined,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: GenFamily,
    #[arg(long)]
    pub d: usize,
    /// Degree of the frame polynomials.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lattice size of the frame points.
    #[arg(long)]
    pub m: Option<usize>,
    /// Top degree for `xi` and `combined`.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Comma-separated kappa (d+1 entries).
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Comma-separated rho (d entries).
    #[arg(long)]
    pub rho: Option<String>,
    /// Comma-separated m_1..m_N for `combined`.
    #[arg(long = "m-list")]
    pub m_list: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Frame file in the JSON format written by `gen`.
    #[arg(required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Verify a bundled example matrix instead of a file.
    #[arg(long, conflicts_with = "input")]
    pub fixture: Option<String>,
    /// Tolerance for float frames; exact frames are decided exactly.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Also compare the Gram matrix with the reproducing kernel.
    #[arg(long)]
    pub gram: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum EvalFamily {
    HahnBasis,
    KrawBasis,
    MonicHahn,
    MonicProj,
    EKernel,
    FKernel,
    Repkernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Basis,
    Monic,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub family: EvalFamily,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Projection or kernel degree.
    #[arg(long)]
    pub n: Option<usize>,
    /// Kernel index for `e_kernel` and `f_kernel`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Kernel form for `repkernel`.
    #[arg(long, value_enum, default_value = "basis")]
    pub via: Via,
    /// Lattice size of the monic kernel form; defaults to N.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Tolerance for the float comparisons against the printed matrices.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

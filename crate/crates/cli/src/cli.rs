use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraclap::hankel::Engine;
use fraclap::model::Method;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Radial profiles of a space-fractional reaction-diffusion steady state"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one or more solution methods on a radial grid.
    Profile(ProfileArgs),
    /// Evaluate two methods side by side with their differences.
    Compare(ProfileArgs),
    /// Point-source solution against its leading algebraic tail.
    Asymptote(AsymptoteArgs),
    /// Run the built-in identity checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Fractional order, 0 < alpha <= 1.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Source intensity.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Elimination rate.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Source radius.
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    /// Diffusion constant.
    #[arg(long = "D", default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Smallest radius (default depends on the command, in units of L).
    #[arg(long)]
    pub rmin: Option<f64>,
    /// Largest radius.
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Number of log-spaced radii.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated methods: integer_closed, full_quadrature, ring,
    /// point_asymptotic, tail_asymptotic, hfun.
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "full_quadrature")]
    pub methods: Vec<Method>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Engine for the two-Bessel-factor integrals.
    #[arg(long, value_parser = parse_engine, default_value = "partitioned")]
    pub engine: Engine,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Tolerance scale: each check's nominal threshold is multiplied by
    /// tol / 1e-6.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.trim().parse().map_err(|e: fraclap::Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: fraclap::Error| e.to_string())
}

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "fracmin", version, about = "Fractional mean curvature, barrier and sliding-argument tools")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Base seed for every Monte-Carlo step.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Relative quadrature tolerance; the absolute tolerance is 1e-3 of it.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, env = "FRACMIN_THREADS")]
    pub threads: Option<usize>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Curvature of a set at a boundary point.
    Curvature(CurvatureArgs),
    /// Barrier profile, fitted decay exponents and supersolution radius.
    Barrier(BarrierArgs),
    /// The constant β_{n,s,α}.
    Beta(BetaArgs),
    /// Replay of the sliding argument on a candidate set.
    Slide(SlideArgs),
    /// Density ratios around a boundary point.
    Density(DensityArgs),
    /// Fractional perimeter inside a ball container.
    Perimeter(PerimeterArgs),
    /// Invariant suites on a fixed deterministic corpus.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Halfspace,
    Ball,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Auto,
    Indicator,
    Graph,
    Radial,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SetSource {
    /// geomset-v1 JSON file (with a tail registration).
    #[arg(long, conflicts_with = "shape")]
    pub set: Option<PathBuf>,
    /// Builtin shape: lower half-space, ball B_r(r e_{n+1}), or barrier F_ε.
    #[arg(long)]
    pub shape: Option<Shape>,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Barrier exponent.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Barrier scale.
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Horizontal distance |x'| of the barrier point.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub source: SetSource,
    /// Boundary point: `origin` or comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Evaluate the complement of the ball instead.
    #[arg(long)]
    pub complement: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BarrierArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Only report β.
    #[arg(long)]
    pub beta_only: bool,
    /// Evaluate the profile on the radius grid and fit exponents.
    #[arg(long)]
    pub fit: bool,
    /// Search a certified supersolution radius (n = 1, α < s).
    #[arg(long = "find-R")]
    pub find_r: bool,
    #[arg(long, default_value_t = 10.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub r_max: f64,
    /// Log-spaced grid size.
    #[arg(long, default_value_t = 21)]
    pub r_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BetaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    Halfspace,
    Notched,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SlideArgs {
    /// Candidate set: geomset-v1 JSON with a tail registration.
    #[arg(long, conflicts_with = "fixture")]
    pub set: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Dimension of the half-space fixture (the notched fixture is planar).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20)]
    pub j_max: usize,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    /// Half-space depth, or notch depth.
    #[arg(long, default_value_t = 2.0)]
    pub depth: f64,
    /// Notch half-width.
    #[arg(long, default_value_t = 2.0)]
    pub notch_width: f64,
    #[arg(long, default_value_t = 20.0)]
    pub sample_width: f64,
    #[arg(long, default_value_t = 4.0)]
    pub sample_depth: f64,
    #[arg(long, default_value_t = 0.25)]
    pub spacing: f64,
    #[arg(long, default_value_t = 100_000)]
    pub volume_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Both,
    ComplementOnly,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub source: SetSource,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long)]
    pub n: usize,
    /// Only used for the touched-ball ceiling.
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    /// Comma-separated radii.
    #[arg(long, default_value = "0.1,0.5,1,2,4")]
    pub rho: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PerimeterArgs {
    #[command(flatten)]
    pub source: SetSource,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: f64,
    /// Container ball center (defaults to the origin).
    #[arg(long, allow_hyphen_values = true)]
    pub container_center: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub container_radius: f64,
    #[arg(long, default_value_t = 20_000)]
    pub lines: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// Grid points per kernel suite.
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
}

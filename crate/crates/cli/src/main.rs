//! `lafair` command-line tool.

mod commands;
mod export;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lafair", version, about = "Log-aesthetic mesh fairing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an analytic test mesh as OBJ
    Gen(GenArgs),
    /// Displace vertices along their normals by seeded uniform noise
    Noise(NoiseArgs),
    /// Run the log-aesthetic surface filter
    Filter(FilterArgs),
    /// Export per-vertex Gaussian curvature as CSV and optional colored PLY
    Curvature(CurvatureArgs),
    /// Report surface energies as JSON
    Metrics(MetricsArgs),
    /// Sample a log-aesthetic curve as CSV and print its recovered slope
    Curve(CurveArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Sphere,
    Plane,
    Cylinder,
    Saddle,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Surface to generate
    pub kind: Kind,
    /// Icosphere subdivision level
    #[arg(long, default_value_t = 3)]
    pub subdiv: usize,
    /// Cells per side for grids, rows for cylinders
    #[arg(long = "n", default_value_t = 16)]
    pub n: usize,
    /// Plane side length, saddle half-extent, or sphere/cylinder radius
    #[arg(long, default_value_t = 1.0)]
    pub size: f64,
    /// Cylinder height
    #[arg(long, default_value_t = 2.0)]
    pub height: f64,
    /// Output OBJ
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Input OBJ
    pub input: PathBuf,
    /// Largest normal offset (length units)
    #[arg(long)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output OBJ
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Boundary {
    Freeze,
    Laplace,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input OBJ
    pub input: PathBuf,
    /// Output OBJ
    #[arg(short, long)]
    pub output: PathBuf,
    /// Run report path [default: <output>.report.json]
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Number of filter iterations
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Neighborhood depth of the curvature plane fit
    #[arg(long, default_value_t = 2)]
    pub ring_depth: usize,
    /// Accepted curvature mismatch [default: 1e-6 / mean_edge^2]
    #[arg(long)]
    pub bisect_tol: Option<f64>,
    /// Initial bracket half-width [default: mean incident edge length per vertex]
    #[arg(long)]
    pub phi_range: Option<f64>,
    /// Bracket doublings before falling back to the centroid
    #[arg(long, default_value_t = 8)]
    pub range_expansions: u32,
    /// Treatment of boundary vertices
    #[arg(long, value_enum, default_value_t = Boundary::Freeze)]
    pub boundary: Boundary,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Input OBJ
    pub input: PathBuf,
    /// CSV output
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write a binary PLY colored by curvature
    #[arg(long)]
    pub ply: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Input OBJ
    pub input: PathBuf,
    /// Mesh with the same vertex order to measure RMS distance against
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Neighborhood depth of the curvature plane fit
    #[arg(long, default_value_t = 2)]
    pub ring_depth: usize,
    /// JSON output (also printed to stdout)
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Slope of the logarithmic curvature graph
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c1: f64,
    /// Tangent angle at the start point, radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c2: f64,
    /// Arc length of the sampled segment
    #[arg(long, default_value_t = 1.0)]
    pub s_max: f64,
    /// Number of sample points
    #[arg(long = "n", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// CSV output
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("LA_FAIR_THREADS") {
        let threads: usize = value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("LA_FAIR_THREADS must be a positive integer, got {value:?}"))?;
        anyhow::ensure!(threads > 0, "LA_FAIR_THREADS must be a positive integer");
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli.command, &args));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

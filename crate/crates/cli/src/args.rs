use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use adsslice::{GridMode, GridSpec};

#[derive(Parser, Debug)]
#[command(name = "adsslice", version, about = "Maximal spacelike slices of anti-de Sitter space")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "ADSSLICE_OUT", default_value = "adsslice-run")]
    pub out: PathBuf,
    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a totally geodesic slice and its diagnostics.
    Oracle(OracleArgs),
    /// Solve the linear problem `L u = eta` with Dirichlet data.
    SolveLinear(SolveLinearArgs),
    /// Solve the maximal-slice equation by amplitude continuation.
    Solve(SolveArgs),
    /// Geometry diagnostics for a height table.
    Diagnose(DiagnoseArgs),
    /// Scaling identity and Jacobian-at-zero checks on random fields.
    Identity(IdentityArgs),
    /// Grid-refinement convergence study.
    Sweep(SweepArgs),
    /// Decide whether boundary samples are the trace of a geodesic slice.
    FitBoundary(FitBoundaryArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Oracle(_) => "oracle",
            Command::SolveLinear(_) => "solve-linear",
            Command::Solve(_) => "solve",
            Command::Diagnose(_) => "diagnose",
            Command::Identity(_) => "identity",
            Command::Sweep(_) => "sweep",
            Command::FitBoundary(_) => "fit-boundary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Axisymmetric,
    Full,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Dimension of the hyperbolic ball.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Axisymmetric grids are n = 3 only; full is the disk for n = 2.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// `NRxNTHETA` or `NRxNTHETAxNPHI`.
    #[arg(long, default_value = "64x32")]
    pub grid: String,
}

impl GridArgs {
    pub fn spec(&self) -> Result<GridSpec, String> {
        let parts: Vec<usize> = self
            .grid
            .split('x')
            .map(|p| p.trim().parse().map_err(|_| format!("bad grid size '{}'", self.grid)))
            .collect::<Result<_, _>>()?;
        let mode = self.mode.unwrap_or(match (self.n, parts.len()) {
            (3, 2) => Mode::Axisymmetric,
            _ => Mode::Full,
        });
        let spec = match (parts.as_slice(), mode) {
            (&[n_r, n_t], Mode::Axisymmetric) => GridSpec { dim: self.n, mode: GridMode::Axisymmetric, n_r, n_theta: n_t, n_phi: 1 },
            (&[n_r, n_t], Mode::Full) if self.n == 2 => GridSpec::disk(n_r, n_t),
            (&[n_r, n_t], Mode::Full) => GridSpec::ball(n_r, n_t, 2 * n_t),
            (&[n_r, n_t, n_p], Mode::Full) if self.n == 3 => GridSpec::ball(n_r, n_t, n_p),
            _ => return Err(format!("grid '{}' does not fit n = {} in {mode:?} mode", self.grid, self.n)),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long = "A", default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long = "B", default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long = "C", default_value_t = 0.3, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub w0: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveLinearArgs {
    /// `zero`, `tau:S[:M]` for `M tau^S`, or `manufactured:S` for the
    /// closed-form `L(tau^S)`.
    #[arg(long, default_value = "manufactured:2")]
    pub eta: String,
    /// Boundary datum; zero when omitted.
    #[arg(long)]
    pub bdata: Option<String>,
    /// Barrier exponent for the weighted bound.
    #[arg(long, default_value_t = 2.0)]
    pub barrier_s: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SolverArgs {
    /// Continuation steps.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Residual target.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Iterates keep `q <= 1 - margin`.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    pub damping_floor: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// `harmonic:l,m:coeff[;...]`, `geodesic:A,B,C,w0` or `file:<path>`.
    #[arg(long)]
    pub bdata: String,
    /// The boundary data are `sqrt(eps)` times the datum.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eps: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagnoseArgs {
    /// Height table with columns `r,theta[,phi],value`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCase {
    /// PDE residual of the geodesic slice with coefficient `C`.
    Oracle,
    /// Error of the manufactured linear solution `tau^2`.
    Linear,
    /// Gauss-identity residual of the geodesic slice.
    Gauss,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "oracle")]
    pub case: SweepCase,
    /// Number of grids, each doubling the previous one.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long = "C", default_value_t = 0.3, allow_hyphen_values = true)]
    pub c: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FitBoundaryArgs {
    /// Boundary samples with columns `theta[,phi],value`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = adsslice::exact::FIT_TOLERANCE)]
    pub tol: f64,
}

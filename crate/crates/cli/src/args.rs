//! Command-line grammar. Every experiment parameter is optional on the
//! command line and may instead come from a JSON config file with the same
//! field names; explicit flags win over the file, defaults fill the rest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "convexsandwich",
    version,
    about = "Verification suites for desk-scale convex geometry",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate double-cone stability instances and verify the containments.
    VerifyLemma3(VerifyLemma3Args),
    /// Check the intersection identity slice-by-slice and set-level.
    SectionIdentity(SectionIdentityArgs),
    /// Run the spherical-mean bound chain on near-ball instances.
    Eq2Chain(Eq2ChainArgs),
    /// Minimum-volume enclosing ellipsoid of a body.
    Mvee(MveeArgs),
    /// Concentric ball sandwich certificate for a polytope.
    BallDistance(BallDistanceArgs),
    /// Monte Carlo spherical mean of a gauge.
    MeanNorm(MeanNormArgs),
    /// Best spherical ratios of random projections across dimensions.
    DvoretzkyScan(DvoretzkyScanArgs),
    /// Apply a symmetric-case witness to a non-symmetric body.
    Reduce(ReduceArgs),
    /// Projection/section polarity duality on sampled directions.
    PolarityCheck(PolarityCheckArgs),
}

/// Runtime options shared by every subcommand; not part of the experiment
/// config that reports echo.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Output directory for reports.
    #[arg(long, default_value = "./out")]
    pub out: PathBuf,
    /// JSON config file with the subcommand's parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (overrides CONVEXSANDWICH_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also emit an SVG scatter where the command provides one.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyLemma3Args {
    /// Ambient dimension of the generated cones.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of generated instances.
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rejection threshold for the generator's measured delta.
    #[arg(long)]
    pub max_delta: Option<f64>,
    /// Perturbation points added to T/2 per instance.
    #[arg(long)]
    pub perturbations: Option<usize>,
    /// Gaussian noise scale for the perturbation points.
    #[arg(long)]
    pub noise: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct SectionIdentityArgs {
    /// Dilation factor in [1, 3/2).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of slice heights on the grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Cone spec: "b1:<dim>" or "random:<dim>".
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct Eq2ChainArgs {
    /// Vertices of the inscribed polygon used for generated instances.
    #[arg(long)]
    pub ngon: Option<usize>,
    #[arg(long)]
    pub instances: Option<usize>,
    /// Witness quality: requires measured delta ≤ 1 + alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Sphere sample budget per instance.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run a single instance from a body file instead of generating.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct MveeArgs {
    /// Body file (VPolytope JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in body, e.g. "cube:2", "crosspolytope:3", "ball-ngon:64".
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct BallDistanceArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub body: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct MeanNormArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct DvoretzkyScanArgs {
    /// Comma-separated ambient dimensions, e.g. "4,8,16".
    #[arg(long)]
    pub dims: Option<String>,
    /// Projection dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Haar trials per dimension.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Directions sampled per trial.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Body family: "cube", "crosspolytope", or "simplex".
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct ReduceArgs {
    /// Body file for K (VPolytope JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Witness file (subspace, case tag, normalizing map).
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Auto-witness case when no witness file is given: "ball" or "cross".
    #[arg(long)]
    pub case: Option<String>,
    /// Auto-witness subspace: the first m coordinates.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Case-(i) sub-projection dimension.
    #[arg(long)]
    pub sub_dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pass/fail threshold on the certified ratio.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
pub struct PolarityCheckArgs {
    /// Body file; when absent, random bodies are generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Ambient dimension for generated bodies.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Subspace dimension; 0 draws a random one per instance.
    #[arg(long)]
    pub subspace_dim: Option<usize>,
    /// Number of (body, subspace) instances.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Directions sampled per instance.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: CommonArgs,
}

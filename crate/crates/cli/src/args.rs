//! Command-line flags and the JSON config file that mirrors them.
//!
//! Every subcommand flag is optional at parse time so that a value coming
//! from the config file can be told apart from one given on the command line.
//! Flags win over the file; built-in defaults apply last.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub const SEED_ENV: &str = "HELLINGER_SEED";
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "hellinger", version, about = "Hellinger information, minimax bounds and optimal designs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Random seed [default: $HELLINGER_SEED, else 7]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Maximum number of worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON file whose keys mirror the long flags; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regularity index and Hellinger information of a model
    Info(InfoArgs),
    /// The location-family integral r(beta)
    Rbeta(RbetaArgs),
    /// Hellinger-optimal design on [-A, A]; writes design.json and summary.csv
    DesignOpt(DesignOptArgs),
    /// Optimal weight at 0 of the three-point quadratic design
    PiCurve(PiCurveArgs),
    /// Monte Carlo risk of the lower-envelope estimator under several designs
    Simulate(SimulateArgs),
    /// Minimax lower bound from an information value or a Fisher matrix
    Bound(BoundArgs),
    /// Regular (E-)optimal design maximizing the smallest eigenvalue
    EOptimal(EOptimalArgs),
    /// Lower-envelope fit of a polynomial to an `x,y` CSV dataset
    Fit(FitArgs),
}

/// Fills every `None` field of `$a` from `$b`.
macro_rules! fill {
    ($a:ident, $b:ident; $($f:ident),* $(,)?) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )*
    };
}

pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InfoArgs {
    /// Error family for a location model: gamma, weibull or exponential
    #[arg(long)]
    pub family: Option<String>,
    /// Shape of the error family, in [1, 2)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Scale of the error family [default: 1]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Uniform family: scale, reciprocal, power-pair or loc-scale
    #[arg(long)]
    pub uniform: Option<String>,
    /// Parameter value of the uniform family (comma separated)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    /// Unit direction u (comma separated) [default: first coordinate axis]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    /// Estimate (alpha, J) numerically from the squared Hellinger distance
    #[arg(long)]
    #[serde(default)]
    pub limit_fit: bool,
}

impl Merge for InfoArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; family, beta, sigma, uniform, theta, direction);
        self.limit_fit |= f.limit_fit;
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RbetaArgs {
    /// Shapes at which to evaluate r (comma separated) [default: 1,1.2,1.5,1.8]
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Output CSV path [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Merge for RbetaArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; beta, output);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DesignOptArgs {
    /// Polynomial degree p
    #[arg(long)]
    pub degree: Option<usize>,
    /// Half-width of the design interval [-A, A]
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<f64>,
    /// Regularity index alpha in [1, 2]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Information constant J~ of the error law [default: 1]
    #[arg(long)]
    pub j_tilde: Option<f64>,
    /// Candidate grid size (odd) [default: 101]
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Relative gap tolerance [default: 1e-5]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Cutting-plane iteration cap [default: 500]
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Cut pool cap [default: 500]
    #[arg(long)]
    pub max_cuts: Option<usize>,
    /// Allow asymmetric designs on the grid
    #[arg(long)]
    #[serde(default)]
    pub asymmetric: bool,
    /// `grid` (cutting plane over the grid) or `three-point` ({-A, 0, A}, degree 2) [default: grid]
    #[arg(long)]
    pub structure: Option<String>,
    /// Directory receiving design.json and summary.csv [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Merge for DesignOptArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; degree, a, alpha, j_tilde, grid_size, tolerance, max_iterations, max_cuts, structure, out_dir);
        self.asymmetric |= f.asymmetric;
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PiCurveArgs {
    /// Interval half-widths (comma separated) [default: 1,1.5,2]
    #[arg(long = "A", value_delimiter = ',')]
    #[serde(rename = "A")]
    pub a: Option<Vec<f64>>,
    /// Explicit alpha values (comma separated); overrides the range flags
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// First alpha of the grid [default: 1]
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// Last alpha of the grid [default: 2]
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Grid step [default: 0.05]
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Output CSV path [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Merge for PiCurveArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; a, alphas, alpha_min, alpha_max, alpha_step, output);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateArgs {
    /// Polynomial degree p [default: 1]
    #[arg(long)]
    pub degree: Option<usize>,
    /// Error shape, which is also the regularity index alpha, in [1, 2) [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Error family: gamma, weibull or exponential [default: gamma]
    #[arg(long)]
    pub family: Option<String>,
    /// Error scale [default: 1]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Half-width of the design interval [default: 1]
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<f64>,
    /// Total sample size [default: 120]
    #[arg(long)]
    pub n: Option<usize>,
    /// True coefficients (comma separated) [default: 6,0.5 for degree 1]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    /// Design ids: optimal, grid-optimal, three-point, regular-optimal, uniformK or file:PATH
    #[arg(long, value_delimiter = ',')]
    pub designs: Option<Vec<String>>,
    /// Monte Carlo replicates [default: 1000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output CSV path [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Merge for SimulateArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; degree, alpha, family, sigma, a, n, theta, designs, reps, output);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundArgs {
    /// Regularity index alpha in (0, 2] [default: 2 with --fisher]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Direction-free information per observation
    #[arg(long)]
    pub info: Option<f64>,
    /// Number of observations multiplying the information [default: 1]
    #[arg(long)]
    pub n: Option<usize>,
    /// Fisher matrix, rows separated by `;`, entries by `,`
    #[arg(long, allow_hyphen_values = true)]
    pub fisher: Option<String>,
    /// Jacobian of the interest parameter, same layout [default: identity]
    #[arg(long, allow_hyphen_values = true)]
    pub dpsi: Option<String>,
}

impl Merge for BoundArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; alpha, info, n, fisher, dpsi);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EOptimalArgs {
    /// Half-width of the design interval
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<f64>,
    /// Polynomial degree p [default: 2]
    #[arg(long)]
    pub degree: Option<usize>,
    /// Candidate grid size (odd) [default: 101]
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Design JSON path [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Merge for EOptimalArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; a, degree, grid_size, output);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FitArgs {
    /// CSV file with header `x,y`
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Polynomial degree p [default: 1]
    #[arg(long)]
    pub degree: Option<usize>,
    /// `sum-fitted` (exponential MLE) or `intercept` [default: sum-fitted]
    #[arg(long)]
    pub objective: Option<String>,
}

impl Merge for FitArgs {
    fn merge(mut self, f: Self) -> Self {
        fill!(self, f; data, degree, objective);
        self
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Power-series solutions of the SIR epidemic model.
///
/// A scenario comes from `--scenario` (a JSON file or one of the bundled
/// names `bubonic`, `ebola`, `covid_japan`) and/or `--s0`/`--i0`, which
/// override the file.
#[derive(Debug, Parser)]
#[command(name = "sir-gauge", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario JSON file or bundled scenario name
    #[arg(long, global = true, value_name = "FILE|NAME")]
    pub scenario: Option<String>,

    /// Nondimensional initial susceptibles S̃₀
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s0: Option<f64>,

    /// Nondimensional initial infected Ĩ₀
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub i0: Option<f64>,

    /// Output path (default: stdout)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format; each command has a native default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series and RK4 trajectories with reconstructed populations
    Solve(SolveArgs),
    /// Series coefficients A_n, C_n (and B_n)
    Coeffs(CoeffsArgs),
    /// Root/ratio-test radius and convergence class
    Radius(RadiusArgs),
    /// Parameter-space survey of a metric on a grid
    Survey(SurveyArgs),
    /// Complex singularities nearest the origin
    Singularities(SingularitiesArgs),
    /// Maximum deviation of the y-series from RK4
    ErrorScan(ErrorScanArgs),
    /// Small- and large-Ĩ₀ asymptotic components
    Asymptotics(AsymptoticsArgs),
    /// Coefficients of the pole-pair toy model
    Toy(ToyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Truncation order
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// End of the time window
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    /// RK4 step
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    /// Spacing of output rows in T
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Series gauge
    #[arg(long, default_value = "shifted")]
    pub gauge: String,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Highest order
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Series gauge
    #[arg(long, default_value = "shifted")]
    pub gauge: String,
    /// Also emit the ξ coefficients B_n
    #[arg(long)]
    pub with_b: bool,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    /// Order of the root test
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Series gauge
    #[arg(long, default_value = "shifted")]
    pub gauge: String,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    /// Metric to evaluate at each cell
    #[arg(long, default_value = "radius")]
    pub metric: String,
    /// Series order per cell
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// S̃₀ range as MIN,MAX
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.05, 4.0])]
    pub s0_range: Vec<f64>,
    /// Ĩ₀ range as MIN,MAX
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.05, 2.0])]
    pub i0_range: Vec<f64>,
    #[arg(long, default_value_t = 80)]
    pub s0_cells: usize,
    #[arg(long, default_value_t = 60)]
    pub i0_cells: usize,
    /// Worker threads (default: SIR_GAUGE_THREADS, else all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Time window for the max-error metric
    #[arg(long)]
    pub tmax: Option<f64>,
    /// RK4 step for the max-error metric
    #[arg(long)]
    pub dt: Option<f64>,
    /// Metadata sidecar path (default: next to --out)
    #[arg(long, value_name = "PATH")]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    #[value(name = "y")]
    Y,
    #[value(name = "T", alias = "t")]
    T,
}

#[derive(Debug, Args)]
pub struct SingularitiesArgs {
    /// Expansion variable
    #[arg(long, value_enum, default_value = "y")]
    pub domain: DomainArg,
    /// Truncation orders, comma separated
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<usize>,
    /// Polynomial root finder
    #[arg(long, default_value = "auto")]
    pub finder: String,
    /// One row per order: N, re, im, rho
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct ErrorScanArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// y, H1, H2 (needs S̃₀)
    H,
    /// y, J11, J23, J34, J35
    J,
    /// y, P0, P1 (needs Ĩ₀)
    P,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, value_enum, default_value = "h")]
    pub mode: Mode,
    /// Number of evenly spaced y values on [0, 1]
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// Fixed-pole strength M
    #[arg(long, default_value_t = 1e-10)]
    pub m: f64,
    /// Pole-pair strength
    #[arg(long, default_value_t = 1.0)]
    pub n_amp: f64,
    #[arg(long, default_value_t = 1.14)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.06)]
    pub phi: f64,
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
}

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "wva",
    version,
    about = "Fisher information of postselected weak measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Pr(f) and Fisher informations over selections and theta (CSV)
    Sweep(SweepArgs),
    /// Randomized audit of Pr(f) I(rho_ps) <= I(rho_int)
    CheckInequality(AuditArgs),
    /// Monte Carlo maximum-likelihood comparison of the two strategies
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Probe position spread
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    /// Random seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// TOML file whose keys are this command's flag names in snake_case;
    /// flags given on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Grid,
    Analytic,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Smallest theta / sigma
    #[arg(long, default_value_t = 0.0)]
    pub theta_min: f64,

    /// Largest theta / sigma
    #[arg(long, default_value_t = 5.0)]
    pub theta_max: f64,

    /// Number of theta points, endpoints included
    #[arg(long, default_value_t = 201)]
    pub steps: usize,

    /// Grid count for t1 on [0, pi)
    #[arg(long, default_value_t = 16)]
    pub n_t1: usize,

    /// Grid count for t2 on [0, pi)
    #[arg(long, default_value_t = 16)]
    pub n_t2: usize,

    /// Grid count for s1 - s2 on [0, 2 pi)
    #[arg(long, default_value_t = 16)]
    pub n_ds: usize,

    /// Explicit t1 values (comma separated), overriding --n-t1
    #[arg(long, value_delimiter = ',')]
    pub t1: Option<Vec<f64>>,

    /// Explicit t2 values (comma separated), overriding --n-t2
    #[arg(long, value_delimiter = ',')]
    pub t2: Option<Vec<f64>>,

    /// Explicit s1 - s2 values (comma separated), overriding --n-ds
    #[arg(long, value_delimiter = ',')]
    pub ds: Option<Vec<f64>>,

    /// Evaluation engine
    #[arg(long, value_enum, default_value_t = EngineArg::Grid)]
    pub engine: EngineArg,

    /// Momentum grid size for the grid engine (power of two) [default: 2048]
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Number of random instances
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,

    /// Smallest system and probe dimension
    #[arg(long, default_value_t = 2)]
    pub min_dim: usize,

    /// Largest system and probe dimension
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,

    /// Lower end of the theta range
    #[arg(long, default_value_t = 0.0)]
    pub theta_min: f64,

    /// Upper end of the theta range
    #[arg(long, default_value_t = 5.0)]
    pub theta_max: f64,

    /// Relative slack t; the absolute slack is t * 1e-3
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Every k-th trial uses a product Hamiltonian A (x) P; 0 disables
    #[arg(long, default_value_t = 4)]
    pub product_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    PostselectedPosition,
    JointPosition,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// True parameter in units of sigma
    #[arg(long, default_value_t = 2.0)]
    pub theta_over_sigma: f64,

    /// Prepared copies per repetition
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,

    /// Repetitions
    #[arg(long, default_value_t = 500)]
    pub reps: usize,

    /// Pre-selection polar angle
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub t1: f64,

    /// Post-selection polar angle
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub t2: f64,

    /// Relative phase s1 - s2
    #[arg(long, default_value_t = 0.0)]
    pub ds: f64,

    /// Strategies to run (comma separated)
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_values_t = [StrategyArg::PostselectedPosition, StrategyArg::JointPosition]
    )]
    pub strategies: Vec<StrategyArg>,

    /// Lower end of the MLE search interval [default: 0]
    #[arg(long)]
    pub search_min: Option<f64>,

    /// Upper end of the MLE search interval [default: 8 sigma]
    #[arg(long)]
    pub search_max: Option<f64>,

    /// Points of the tabulated sampling density
    #[arg(long, default_value_t = 8193)]
    pub table_points: usize,
}

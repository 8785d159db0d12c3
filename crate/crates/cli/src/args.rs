//! Command-line surface. Every command resolves its flags into a
//! [`crate::config::RunConfig`] before anything runs.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "shotnoise",
    version,
    about = "Shot noise, its Levy-driven and Gaussian OU limits, and the error between them",
    long_about = "Shot noise X(t) with decay rate alpha, event rate lambda and jump law J; its \
                  Levy-driven OU limit Y_L and the Gaussian OU Y_G. Times are in the same unit as \
                  1/alpha and 1/lambda. Output files start with '#' metadata lines (CSV) or a \
                  metadata object (JSON) holding the tool version, the resolved configuration and \
                  the seed; `shotnoise replay FILE` reproduces them byte for byte.\n\n\
                  Exit codes: 0 ok, 2 usage or invalid parameters, 3 resource guard, 4 numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a process at one time (ensemble) or along a time grid (paths).
    Simulate(SimulateArgs),
    /// Closed-form mean, variance, covariance and (shot noise) fourth moment.
    Moments(MomentsArgs),
    /// Evaluate lambda*E[J^k], k = 1, 2, 4, along a lambda grid and classify the limit.
    Check(CheckArgs),
    /// Levy-Khinchin tail U(x) of a subordinator.
    Tails(TailsArgs),
    /// IAE of shot noise against its Levy-OU and Gaussian OU limits over a grid of cells.
    Compare(CompareArgs),
    /// Re-run the configuration embedded in an output file.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file [path]; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessKind {
    /// Shot noise with jump law from --family (Table 1 parametrization at --lambda) or --jump.
    Shot,
    /// OU driven by the gamma process with shape mu^2/sigma_tilde2 and rate mu/sigma_tilde2.
    OuGamma,
    /// OU driven by the inverse Gaussian process with s = sqrt(mu^3/sigma_tilde2), b = sqrt(mu/sigma_tilde2).
    OuIg,
    /// OU driven by a Poisson process of rate mu with unit jumps.
    OuPoisson,
    /// OU driven by the beta process (mu, beta); moments only, no exact sampler.
    OuBeta,
    /// Gaussian OU with drift mu and diffusion coefficient sigma2.
    GaussOu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// p = mu/lambda.
    Bernoulli,
    /// Poisson mean mu/lambda.
    Poisson,
    /// shape mu*beta/lambda, rate beta = mu/sigma_tilde2.
    Gamma,
    /// k = mu/lambda degrees of freedom.
    Chisq,
    /// mean mu/lambda, shape mu^3/(lambda^2 sigma_tilde2).
    Ig,
    /// shapes (mu*beta/lambda, beta); beta defaults to mu/sigma_tilde2.
    Beta,
    /// mean mu/lambda.
    Exponential,
    /// Constant jumps mu/lambda (--scaling mean) or sqrt(sigma2/lambda) (--scaling second-moment).
    Degenerate,
    /// Mixture of a calibrated nonnegative law with a vanishing negative atom (--c1, --c2, --c3).
    Theorem3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingKind {
    Mean,
    SecondMoment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationKind {
    Gamma,
    Ig,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubKind {
    /// Poisson process, Levy measure mu*delta(x-1).
    Pp,
    /// Gamma process from (mu, sigma_tilde2).
    Gp,
    /// Inverse Gaussian process from (mu, sigma_tilde2).
    Igp,
    /// Beta process (mu, beta).
    Bp,
}

/// Jump-law parameters shared by `simulate`, `moments` and `check`.
#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Limit drift mu = lim lambda*E[J] [state units per unit time].
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Table 1 scale sigma_tilde2 (gamma, IG, tied beta) [state units^2 per unit time].
    #[arg(long, default_value_t = 3.0)]
    pub sigma_tilde2: f64,
    /// Second shape of the beta family [dimensionless]; default mu/sigma_tilde2.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Diffusion coefficient sigma^2 [state units^2 per unit time]: Gaussian OU, the
    /// theorem3 mixture, and constant jumps under second-moment scaling.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// How constant jumps scale with lambda.
    #[arg(long, value_enum, default_value_t = ScalingKind::Mean)]
    pub scaling: ScalingKind,
    /// Exponent c1 in (0, 2/3) of the negative-atom weight lambda^(-1+c1) [dimensionless].
    #[arg(long, default_value_t = 0.5)]
    pub c1: f64,
    /// Exponent c2 in (0, c1/2) of the positive-part mean lambda^(-1+c2) [dimensionless].
    #[arg(long, default_value_t = 0.2)]
    pub c2: f64,
    /// Exponent c3 > 0 of the prescribed fourth moment lambda^(-1-c3) [dimensionless].
    #[arg(long, default_value_t = 1.0)]
    pub c3: f64,
    /// Law of the positive part of the theorem3 mixture.
    #[arg(long, value_enum, default_value_t = CalibrationKind::Gamma)]
    pub calibration: CalibrationKind,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Process to sample or evaluate.
    #[arg(long, value_enum, default_value_t = ProcessKind::Shot)]
    pub process: ProcessKind,
    /// Jump family for --process shot, parametrized by --mu/--sigma-tilde2/--beta at --lambda.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Explicit jump law as JSON, e.g. '{"family":"gamma","shape":0.5,"rate":2.0}'; overrides --family [JSON; amplitudes in state units].
    #[arg(long)]
    pub jump: Option<String>,
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Event rate lambda [events per unit time].
    #[arg(long, default_value_t = 1000.0)]
    pub lambda: f64,
    /// Decay rate alpha [per unit time].
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Initial value x0 (y0 for OU processes) [state units].
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("when").required(true).args(["t", "t_grid"])))]
pub struct SimulateArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Single read-out time [time units]; writes one row per sample.
    #[arg(long)]
    pub t: Option<f64>,
    /// Comma-separated increasing read-out times [time units]; writes one row per (path, time).
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    /// Number of samples or paths [count].
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Master seed [integer]; default from SHOTNOISE_SEED, else 0.
    #[arg(long, env = "SHOTNOISE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [count]; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Also write the event list (time, amplitude) of a single exact shot-noise path [path].
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Time t [time units].
    #[arg(long)]
    pub t: f64,
    /// Lag s for Cov(X(t), X(t+s)) [time units].
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Jump-law sequence.
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Comma-separated increasing event rates, at least 4 [events per unit time].
    #[arg(long, value_delimiter = ',', default_value = "1e3,1e4,1e6,1e8")]
    pub lambda_grid: Vec<f64>,
    /// Also print the moment table to standard output.
    #[arg(long)]
    pub table: bool,
    /// JSON report file [path]; only the classification is printed when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TailsArgs {
    /// Subordinator.
    #[arg(long, value_enum)]
    pub sub: SubKind,
    /// Mean jump rate mu = E[L(1)] [state units per unit time].
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Table 1 scale sigma_tilde2 for gp/igp [state units^2 per unit time].
    #[arg(long, alias = "sigma2")]
    pub sigma_tilde2: Option<f64>,
    /// BP shape beta [dimensionless].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated jump sizes x > 0 (x < 1 for bp) [state units].
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Experiment configuration: families, mu, t, lambda lists and optional
    /// sigma_tilde2, alpha, x0, n, levy_n, grid, seed [path to JSON].
    #[arg(long)]
    pub config: PathBuf,
    /// Use n = 10^6 shot-noise samples per cell.
    #[arg(long)]
    pub full: bool,
    /// Shot-noise samples per cell [count]; overrides the file.
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed [integer]; overrides the file (also read from SHOTNOISE_SEED).
    #[arg(long, env = "SHOTNOISE_SEED")]
    pub seed: Option<u64>,
    /// Worker threads [count]; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// File written by an earlier run [path].
    pub file: PathBuf,
    /// Worker threads [count]; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Output file [path]; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

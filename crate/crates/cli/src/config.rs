//! Fully resolved run configurations. These are what output files embed and
//! what `replay` executes.

use serde::{Deserialize, Serialize};

use shotnoise_core::levyou::{GaussianOUParams, LevyOUParams};
use shotnoise_core::limits::{self, Calibration, DegenerateScaling, FamilySequence, Limit, Theorem3Params};
use shotnoise_core::montecarlo::{CompareConfig, ProcessSpec};
use shotnoise_core::shotnoise::{ShotNoiseParams, SteinParams};
use shotnoise_core::{FamilySequence64, JumpFamily64, SubordinatorSpec64};

use crate::args::*;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutFormat {
    Csv,
    Json,
}

impl From<Format> for OutFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutFormat::Csv,
            Format::Json => OutFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Times {
    At(f64),
    Grid(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandConfig {
    Simulate {
        process: ProcessSpec,
        times: Times,
        n: usize,
        /// Single shot-noise path simulated without the ensemble lookback window.
        exact_path: bool,
    },
    Moments {
        process: ProcessSpec,
        t: f64,
        s: f64,
    },
    Check {
        family: FamilySequence64,
        lambda_grid: Vec<f64>,
    },
    Tails {
        sub: SubordinatorSpec64,
        x: Vec<f64>,
    },
    Compare {
        experiment: CompareConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub format: OutFormat,
    pub seed: u64,
    #[serde(flatten)]
    pub command: CommandConfig,
}

pub fn family_sequence(kind: FamilyKind, a: &FamilyArgs) -> Result<FamilySequence64, CliError> {
    let mu = a.mu;
    let sigma2 = a.sigma2.unwrap_or(a.sigma_tilde2);
    let seq = match kind {
        FamilyKind::Bernoulli => FamilySequence::Bernoulli { mu },
        FamilyKind::Poisson => FamilySequence::Poisson { mu },
        FamilyKind::Gamma => FamilySequence::Gamma { mu, sigma_tilde2: a.sigma_tilde2 },
        FamilyKind::Chisq => FamilySequence::ChiSquare { mu },
        FamilyKind::Ig => FamilySequence::InverseGaussian { mu, sigma_tilde2: a.sigma_tilde2 },
        FamilyKind::Beta => match a.beta {
            Some(beta) => FamilySequence::Beta { mu, beta },
            None => FamilySequence::beta_tied(mu, a.sigma_tilde2)?,
        },
        FamilyKind::Exponential => FamilySequence::Exponential { mu },
        FamilyKind::Degenerate => match a.scaling {
            ScalingKind::Mean => FamilySequence::Degenerate { scale: mu, scaling: DegenerateScaling::Mean },
            ScalingKind::SecondMoment => {
                FamilySequence::Degenerate { scale: sigma2, scaling: DegenerateScaling::SecondMoment }
            }
        },
        FamilyKind::Theorem3 => {
            let calibration = match a.calibration {
                CalibrationKind::Gamma => Calibration::Gamma,
                CalibrationKind::Ig => Calibration::InverseGaussian,
                CalibrationKind::Beta => Calibration::Beta,
            };
            FamilySequence::Theorem3(Theorem3Params::new(mu, sigma2, a.c1, a.c2, a.c3, calibration)?)
        }
    };
    seq.validate()?;
    Ok(seq)
}

fn ou(p: &ProcessArgs, seq: FamilySequence64) -> Result<ProcessSpec, CliError> {
    let sub = limits::limit_levy_density(&seq)?;
    Ok(ProcessSpec::LevyOu(LevyOUParams::new(p.alpha, p.x0, sub)?))
}

pub fn process_spec(p: &ProcessArgs) -> Result<ProcessSpec, CliError> {
    let a = &p.fam;
    match p.process {
        ProcessKind::Shot => {
            let jump: JumpFamily64 = match (&p.jump, p.family) {
                (Some(js), _) => serde_json::from_str(js).map_err(|e| CliError::usage(format!("--jump: {e}")))?,
                (None, Some(kind)) => limits::table1_family(&family_sequence(kind, a)?, p.lambda)?,
                (None, None) => return Err(CliError::usage("--process shot needs --family or --jump")),
            };
            let params = ShotNoiseParams::new(p.lambda, p.alpha, p.x0, jump)?;
            if matches!(params.jump, JumpFamily64::Mixture { .. }) {
                Ok(ProcessSpec::Stein(SteinParams::from_mixture(&params)?))
            } else {
                Ok(ProcessSpec::Shot(params))
            }
        }
        ProcessKind::OuGamma => ou(p, FamilySequence::Gamma { mu: a.mu, sigma_tilde2: a.sigma_tilde2 }),
        ProcessKind::OuIg => ou(p, FamilySequence::InverseGaussian { mu: a.mu, sigma_tilde2: a.sigma_tilde2 }),
        ProcessKind::OuPoisson => ou(p, FamilySequence::Poisson { mu: a.mu }),
        ProcessKind::OuBeta => ou(p, family_sequence(FamilyKind::Beta, a)?),
        ProcessKind::GaussOu => {
            let sigma2 = match (a.sigma2, p.family) {
                (Some(s), _) => s,
                (None, Some(kind)) => match limits::limiting_moments(&family_sequence(kind, a)?).sigma2 {
                    Limit::Finite(s) => s,
                    Limit::Infinite => return Err(CliError::usage("family has no finite sigma2 limit")),
                },
                (None, None) => a.sigma_tilde2,
            };
            Ok(ProcessSpec::GaussianOu(GaussianOUParams::new(a.mu, sigma2, p.alpha, p.x0)?))
        }
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<RunConfig, CliError> {
    let process = process_spec(&a.process)?;
    let times = match (&a.t, &a.t_grid) {
        (Some(t), None) => Times::At(*t),
        (None, Some(g)) => Times::Grid(g.clone()),
        _ => return Err(CliError::usage("give exactly one of --t and --t-grid")),
    };
    let exact_path = a.events.is_some();
    if exact_path && !(a.n == 1 && matches!(times, Times::Grid(_)) && matches!(process, ProcessSpec::Shot(_))) {
        return Err(CliError::usage("--events needs --process shot, --n 1 and --t-grid"));
    }
    Ok(RunConfig {
        format: a.out.format.into(),
        seed: a.seed,
        command: CommandConfig::Simulate { process, times, n: a.n, exact_path },
    })
}

pub fn moments(a: &MomentsArgs) -> Result<RunConfig, CliError> {
    Ok(RunConfig {
        format: a.out.format.into(),
        seed: 0,
        command: CommandConfig::Moments { process: process_spec(&a.process)?, t: a.t, s: a.s },
    })
}

pub fn check(a: &CheckArgs) -> Result<RunConfig, CliError> {
    Ok(RunConfig {
        format: OutFormat::Json,
        seed: 0,
        command: CommandConfig::Check { family: family_sequence(a.family, &a.fam)?, lambda_grid: a.lambda_grid.clone() },
    })
}

pub fn tails(a: &TailsArgs) -> Result<RunConfig, CliError> {
    let need_s2 = || a.sigma_tilde2.ok_or_else(|| CliError::usage("--sigma-tilde2 is required for gp and igp"));
    let seq = match a.sub {
        SubKind::Pp => FamilySequence::Poisson { mu: a.mu },
        SubKind::Gp => FamilySequence::Gamma { mu: a.mu, sigma_tilde2: need_s2()? },
        SubKind::Igp => FamilySequence::InverseGaussian { mu: a.mu, sigma_tilde2: need_s2()? },
        SubKind::Bp => FamilySequence::Beta {
            mu: a.mu,
            beta: a.beta.ok_or_else(|| CliError::usage("--beta is required for bp"))?,
        },
    };
    Ok(RunConfig {
        format: a.out.format.into(),
        seed: 0,
        command: CommandConfig::Tails { sub: limits::limit_levy_density(&seq)?, x: a.x.clone() },
    })
}

pub fn compare(a: &CompareArgs) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.config.display())))?;
    let mut experiment: CompareConfig =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", a.config.display())))?;
    if a.full {
        experiment.n = 1_000_000;
    }
    if let Some(n) = a.n {
        experiment.n = n;
    }
    if let Some(seed) = a.seed {
        experiment.seed = seed;
    }
    Ok(RunConfig { format: a.out.format.into(), seed: experiment.seed, command: CommandConfig::Compare { experiment } })
}

//! Jump-size sequences Jₙ indexed by the event rate λₙ, the conditions
//! λₙE[Jₙ] → μ, λₙE[Jₙ²] → σ², λₙE[Jₙ⁴] → 0 and the limit they lead to.
//!
//! Every sequence family carries its hand-derived closed-form limits; the
//! numeric side only evaluates λₙE[Jₙᵏ] through [`JumpFamily::moment`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::JumpFamily;
use crate::error::{invalid, Error, Result};
use crate::levyou::SubordinatorSpec;
use crate::real::Real;

/// Rule that ties a constant jump jₙ to λₙ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateScaling {
    /// jₙ = μ/λₙ, so λₙjₙ = μ and λₙjₙ² → 0.
    #[default]
    Mean,
    /// jₙ = √(σ²/λₙ), so λₙjₙ² = σ² and λₙjₙ → ∞.
    SecondMoment,
}

/// Nonnegative family used for the positive part of the negative-jump mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    #[default]
    Gamma,
    #[serde(rename = "ig")]
    InverseGaussian,
    Beta,
}

/// Parameters of the mixture with a vanishing negative atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Params<T> {
    pub mu: T,
    pub sigma2: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    #[serde(default)]
    pub calibration: Calibration,
}

impl<T: Real> Theorem3Params<T> {
    pub fn new(mu: T, sigma2: T, c1: T, c2: T, c3: T, calibration: Calibration) -> Result<Self> {
        let p = Self { mu, sigma2, c1, c2, c3, calibration };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mu", self.mu)?;
        positive("sigma2", self.sigma2)?;
        if !(self.c1 > T::zero() && self.c1 < T::lit(2.0) / T::lit(3.0)) {
            return Err(invalid(format!("c1 must lie in (0, 2/3), got {}", self.c1)));
        }
        if !(self.c2 > T::zero() && self.c2 < self.c1 * T::lit(0.5)) {
            return Err(invalid(format!("c2 must lie in (0, c1/2) = (0, {}), got {}", self.c1 * T::lit(0.5), self.c2)));
        }
        positive("c3", self.c3)
    }

    /// fₙ = λₙ^{−1+c₁}, the weight of the negative atom.
    pub fn neg_prob(&self, lambda: T) -> T {
        lambda.powf(self.c1 - T::one())
    }

    /// θₙ = −λₙ^{−c₁+c₂} + λₙ^{−c₁}μ.
    pub fn neg_value(&self, lambda: T) -> T {
        -lambda.powf(self.c2 - self.c1) + lambda.powf(-self.c1) * self.mu
    }

    /// Prescribed E[J⁺], E[(J⁺)²], E[(J⁺)⁴].
    pub fn positive_targets(&self, lambda: T) -> [T; 3] {
        [
            lambda.powf(self.c2 - T::one()),
            self.sigma2 / lambda,
            lambda.powf(-T::one() - self.c3),
        ]
    }
}

/// A sequence of jump laws indexed by λₙ.
///
/// JSON form: `{"family": "gamma", "mu": 1.0, "sigma_tilde2": 3.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySequence<T> {
    /// p = μ/λₙ.
    Bernoulli { mu: T },
    /// λ̃ = μ/λₙ.
    Poisson { mu: T },
    /// shape μβ/λₙ, rate β = μ/σ̃².
    Gamma { mu: T, sigma_tilde2: T },
    /// k = μ/λₙ (gamma with rate 1/2, σ̃² = 2μ).
    #[serde(rename = "chisq")]
    ChiSquare { mu: T },
    /// mean μ/λₙ, shape μ³/(λₙ²σ̃²).
    #[serde(rename = "ig")]
    InverseGaussian { mu: T, sigma_tilde2: T },
    /// shapes (μβ/λₙ, β) with β free.
    Beta { mu: T, beta: T },
    /// mean θ = μ/λₙ.
    Exponential { mu: T },
    /// Constant jumps; `scale` is μ under [`DegenerateScaling::Mean`] and σ²
    /// under [`DegenerateScaling::SecondMoment`].
    Degenerate {
        scale: T,
        #[serde(default)]
        scaling: DegenerateScaling,
    },
    Theorem3(Theorem3Params<T>),
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> FamilySequence<T> {
    /// Beta row with β tied to σ̃² through β = μ/σ̃².
    pub fn beta_tied(mu: T, sigma_tilde2: T) -> Result<Self> {
        positive("sigma_tilde2", sigma_tilde2)?;
        let s = Self::Beta { mu, beta: mu / sigma_tilde2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { mu } | Self::Poisson { mu } | Self::ChiSquare { mu } | Self::Exponential { mu } => {
                positive("mu", *mu)
            }
            Self::Gamma { mu, sigma_tilde2 } | Self::InverseGaussian { mu, sigma_tilde2 } => {
                positive("mu", *mu).and(positive("sigma_tilde2", *sigma_tilde2))
            }
            Self::Beta { mu, beta } => positive("mu", *mu).and(positive("beta", *beta)),
            Self::Degenerate { scale, .. } => positive("scale", *scale),
            Self::Theorem3(p) => p.validate(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Poisson { .. } => "poisson",
            Self::Gamma { .. } => "gamma",
            Self::ChiSquare { .. } => "chisq",
            Self::InverseGaussian { .. } => "ig",
            Self::Beta { .. } => "beta",
            Self::Exponential { .. } => "exponential",
            Self::Degenerate { .. } => "degenerate",
            Self::Theorem3(_) => "theorem3",
        }
    }

    /// The target drift μ (for Degenerate under second-moment scaling there
    /// is none and `None` is returned).
    pub fn mu(&self) -> Option<T> {
        match self {
            Self::Bernoulli { mu }
            | Self::Poisson { mu }
            | Self::Gamma { mu, .. }
            | Self::ChiSquare { mu }
            | Self::InverseGaussian { mu, .. }
            | Self::Beta { mu, .. }
            | Self::Exponential { mu } => Some(*mu),
            Self::Degenerate { scale, scaling: DegenerateScaling::Mean } => Some(*scale),
            Self::Degenerate { scaling: DegenerateScaling::SecondMoment, .. } => None,
            Self::Theorem3(p) => Some(p.mu),
        }
    }
}

/// Jump law of the sequence at rate `lambda`.
pub fn table1_family<T: Real>(seq: &FamilySequence<T>, lambda: T) -> Result<JumpFamily<T>> {
    seq.validate()?;
    positive("lambda", lambda)?;
    match *seq {
        FamilySequence::Bernoulli { mu } => {
            let p = mu / lambda;
            if p > T::one() {
                return Err(invalid(format!("Bernoulli needs mu/lambda <= 1, got p = {p}")));
            }
            JumpFamily::bernoulli(p)
        }
        FamilySequence::Poisson { mu } => JumpFamily::poisson(mu / lambda),
        FamilySequence::Gamma { mu, sigma_tilde2 } => {
            let rate = mu / sigma_tilde2;
            JumpFamily::gamma(mu * rate / lambda, rate)
        }
        FamilySequence::ChiSquare { mu } => JumpFamily::chi_square(mu / lambda),
        FamilySequence::InverseGaussian { mu, sigma_tilde2 } => {
            JumpFamily::inverse_gaussian(mu / lambda, mu * mu * mu / (lambda * lambda * sigma_tilde2))
        }
        FamilySequence::Beta { mu, beta } => JumpFamily::beta(mu * beta / lambda, beta),
        FamilySequence::Exponential { mu } => JumpFamily::exponential(mu / lambda),
        FamilySequence::Degenerate { scale, scaling } => JumpFamily::degenerate(match scaling {
            DegenerateScaling::Mean => scale / lambda,
            DegenerateScaling::SecondMoment => (scale / lambda).sqrt(),
        }),
        FamilySequence::Theorem3(p) => theorem3_mixture(&p, lambda),
    }
}

/// Closed-form limit of one sequence λₙE[Jₙᵏ].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Limit<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            Limit::Finite(v) => Some(*v),
            Limit::Infinite => None,
        }
    }
}

/// Limits of λₙE[Jₙ], λₙE[Jₙ²], λₙE[Jₙ⁴].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitingMoments<T> {
    pub mu: Limit<T>,
    pub sigma2: Limit<T>,
    pub m4: Limit<T>,
    /// Constant jumps cannot keep both λₙjₙ and λₙjₙ² finite and nonzero.
    pub incompatible: bool,
}

pub fn limiting_moments<T: Real>(seq: &FamilySequence<T>) -> LimitingMoments<T> {
    use Limit::Finite;
    let six = T::lit(6.0);
    let zero = T::zero();
    let lim = |mu, sigma2, m4| LimitingMoments { mu: Finite(mu), sigma2: Finite(sigma2), m4: Finite(m4), incompatible: false };
    match *seq {
        FamilySequence::Bernoulli { mu } | FamilySequence::Poisson { mu } => lim(mu, mu, mu),
        FamilySequence::Gamma { mu, sigma_tilde2: s } => lim(mu, s, six * s * s * s / (mu * mu)),
        FamilySequence::ChiSquare { mu } => lim(mu, T::lit(2.0) * mu, T::lit(48.0) * mu),
        FamilySequence::InverseGaussian { mu, sigma_tilde2: s } => lim(mu, s, T::lit(15.0) * s * s * s / (mu * mu)),
        FamilySequence::Beta { mu, beta: b } => {
            let one = T::one();
            lim(mu, mu / (b + one), six * mu / ((b + one) * (b + T::lit(2.0)) * (b + T::lit(3.0))))
        }
        FamilySequence::Exponential { mu } => lim(mu, zero, zero),
        FamilySequence::Degenerate { scale, scaling } => match scaling {
            DegenerateScaling::Mean => LimitingMoments { incompatible: true, ..lim(scale, zero, zero) },
            DegenerateScaling::SecondMoment => LimitingMoments {
                mu: Limit::Infinite,
                sigma2: Finite(scale),
                m4: Finite(zero),
                incompatible: true,
            },
        },
        FamilySequence::Theorem3(p) => lim(p.mu, p.sigma2, zero),
    }
}

/// Limit type of a jump sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum Classification {
    MeanExplodes,
    Deterministic,
    GaussianDiffusion,
    /// Lévy-driven OU with subordinator label PP, GP, IGP or BP.
    LevyOu(&'static str),
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MeanExplodes => f.write_str("mean_explodes"),
            Self::Deterministic => f.write_str("deterministic"),
            Self::GaussianDiffusion => f.write_str("gaussian_diffusion"),
            Self::LevyOu(label) => write!(f, "levy_ou({label})"),
            Self::Unknown => f.write_str("unknown"),
        }
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mean_explodes" => Self::MeanExplodes,
            "deterministic" => Self::Deterministic,
            "gaussian_diffusion" => Self::GaussianDiffusion,
            "unknown" => Self::Unknown,
            "levy_ou(PP)" => Self::LevyOu("PP"),
            "levy_ou(GP)" => Self::LevyOu("GP"),
            "levy_ou(IGP)" => Self::LevyOu("IGP"),
            "levy_ou(BP)" => Self::LevyOu("BP"),
            other => return Err(invalid(format!("unknown classification {other:?}"))),
        })
    }
}

impl From<Classification> for String {
    fn from(c: Classification) -> String {
        c.to_string()
    }
}

impl<'de> Deserialize<'de> for Classification {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Classification from the limits: the mean must stay finite, a vanishing
/// σ² gives a deterministic limit, and a Gaussian diffusion needs M₄ = 0.
pub fn classify<T: Real>(seq: &FamilySequence<T>, limits: &LimitingMoments<T>) -> Classification {
    let (Some(_), Some(sigma2), Some(m4)) = (limits.mu.finite(), limits.sigma2.finite(), limits.m4.finite()) else {
        return match limits.mu {
            Limit::Infinite => Classification::MeanExplodes,
            Limit::Finite(_) => Classification::Unknown,
        };
    };
    if sigma2 == T::zero() {
        Classification::Deterministic
    } else if m4 == T::zero() {
        Classification::GaussianDiffusion
    } else {
        match limit_levy_density(seq) {
            Ok(sub) => Classification::LevyOu(sub.label()),
            Err(_) => Classification::Unknown,
        }
    }
}

/// Finite-grid trend of one sequence λₙE[Jₙᵏ] towards its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTrend<T> {
    pub order: u32,
    /// Expected algebraic rate: the error shrinks like λₙ^{−gap}.
    pub gap: T,
    /// Relative error to the limit (absolute when the limit is 0, 1/|value|
    /// when it is infinite), one per grid point.
    pub errors: Vec<T>,
    pub monotone: bool,
    /// 10·e₀·(λ₀/λ_last)^gap.
    pub tolerance: T,
    pub converged: bool,
}

/// Numeric and closed-form view of the conditions over a λ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport<T> {
    pub family: FamilySequence<T>,
    pub lambda_grid: Vec<T>,
    pub m1_values: Vec<T>,
    pub m2_values: Vec<T>,
    pub m4_values: Vec<T>,
    pub closed_form_limits: LimitingMoments<T>,
    pub trends: Vec<MomentTrend<T>>,
    pub classification: Classification,
}

/// Exponents of the slowest-decaying correction of λₙE[Jₙᵏ], k = 1, 2, 4.
fn convergence_gaps<T: Real>(seq: &FamilySequence<T>) -> [T; 3] {
    let one = T::one();
    match seq {
        FamilySequence::Degenerate { scaling: DegenerateScaling::SecondMoment, .. } => [T::lit(0.5), one, one],
        FamilySequence::Theorem3(p) => {
            let g1 = one - p.c1 - p.c2;
            let g2 = (one - p.c1).min(p.c1 - T::lit(2.0) * p.c2);
            // calibrated positive parts have E[(J⁺)⁴] ∝ Var³/E[J⁺]² ~ λ^{−1−2c₂}
            let g4 = (T::lit(2.0) * p.c2).min(T::lit(3.0) * p.c1 - T::lit(4.0) * p.c2);
            [g1, g2, g4]
        }
        _ => [one; 3],
    }
}

fn trend<T: Real>(order: u32, gap: T, lambdas: &[T], values: &[T], limit: Limit<T>) -> MomentTrend<T> {
    let errors: Vec<T> = values
        .iter()
        .map(|&v| match limit {
            Limit::Infinite => v.abs().recip(),
            Limit::Finite(l) if l == T::zero() => v.abs(),
            Limit::Finite(l) => ((v - l) / l).abs(),
        })
        .collect();
    let slack = T::lit(64.0) * T::epsilon();
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] * (T::one() + slack) + slack);
    let (first, last) = (errors[0], errors[errors.len() - 1]);
    let ratio = lambdas[0] / lambdas[lambdas.len() - 1];
    let tolerance = T::lit(10.0) * first * ratio.powf(gap);
    let converged = last <= tolerance + slack;
    MomentTrend { order, gap, errors, monotone, tolerance, converged }
}

/// Evaluates λₙE[Jₙᵏ] (k = 1, 2, 4) over `lambda_grid` and classifies the limit.
pub fn check_conditions<T: Real>(seq: &FamilySequence<T>, lambda_grid: &[T]) -> Result<ConditionReport<T>> {
    seq.validate()?;
    if lambda_grid.len() < 4 {
        return Err(invalid(format!("lambda grid needs at least 4 points, got {}", lambda_grid.len())));
    }
    if !lambda_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("lambda grid must be strictly increasing"));
    }
    let mut m = [Vec::new(), Vec::new(), Vec::new()];
    for &lambda in lambda_grid {
        let jump = table1_family(seq, lambda)?;
        for (slot, k) in m.iter_mut().zip([1, 2, 4]) {
            slot.push(lambda * jump.moment(k));
        }
    }
    let limits = limiting_moments(seq);
    let gaps = convergence_gaps(seq);
    let trends = [(1, limits.mu), (2, limits.sigma2), (4, limits.m4)]
        .iter()
        .zip(gaps)
        .zip(&m)
        .map(|((&(k, l), g), vals)| trend(k, g, lambda_grid, vals, l))
        .collect();
    let [m1_values, m2_values, m4_values] = m;
    Ok(ConditionReport {
        family: seq.clone(),
        lambda_grid: lambda_grid.to_vec(),
        m1_values,
        m2_values,
        m4_values,
        closed_form_limits: limits,
        trends,
        classification: classify(seq, &limits),
    })
}

impl<T: Real> ConditionReport<T> {
    /// Fixed-width text table, one row per λₙ, followed by the limits and
    /// the classification.
    pub fn to_table(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "family: {}", self.family.kind());
        let _ = writeln!(out, "{:>14} {:>22} {:>22} {:>22}", "lambda", "lambda*E[J]", "lambda*E[J^2]", "lambda*E[J^4]");
        for i in 0..self.lambda_grid.len() {
            let _ = writeln!(
                out,
                "{:>14.6e} {:>22.15e} {:>22.15e} {:>22.15e}",
                self.lambda_grid[i].as_f64(),
                self.m1_values[i].as_f64(),
                self.m2_values[i].as_f64(),
                self.m4_values[i].as_f64()
            );
        }
        let show = |l: Limit<T>| match l {
            Limit::Finite(v) => format!("{:.15e}", v.as_f64()),
            Limit::Infinite => "inf".to_string(),
        };
        let lim = &self.closed_form_limits;
        let _ = writeln!(out, "{:>14} {:>22} {:>22} {:>22}", "limit", show(lim.mu), show(lim.sigma2), show(lim.m4));
        for t in &self.trends {
            let _ = writeln!(
                out,
                "k={}: final error {:.3e}, tolerance {:.3e}, monotone {}, converged {}",
                t.order,
                t.errors.last().map_or(f64::NAN, |e| e.as_f64()),
                t.tolerance.as_f64(),
                t.monotone,
                t.converged
            );
        }
        if lim.incompatible {
            let _ = writeln!(out, "constant jumps: mean and variance targets are incompatible");
        }
        let _ = writeln!(out, "classification: {}", self.classification);
        out
    }
}

/// Calibrated positive part of the negative-jump mixture together with how
/// far its fourth moment is from the prescribed λₙ^{−1−c₃}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Calibration<T> {
    pub lambda: T,
    pub family: JumpFamily<T>,
    /// Prescribed E[J⁺], E[(J⁺)²], E[(J⁺)⁴].
    pub prescribed: [T; 3],
    /// Achieved E[J⁺], E[(J⁺)²], E[(J⁺)⁴].
    pub achieved: [T; 3],
    /// Whether any law can meet the prescribed fourth moment together with
    /// the second: it needs E[(J⁺)⁴] ≥ E[(J⁺)²]².
    pub fourth_moment_feasible: bool,
}

/// Positive part matching the first two prescribed moments exactly.
///
/// All three calibrations keep E[(J⁺)⁴] of order λₙ^{−1−2c₂}, which vanishes
/// after multiplying by λₙ; the prescribed λₙ^{−1−c₃} itself is only
/// reachable when λₙ^{−1−c₃} ≥ σ⁴λₙ^{−2}.
pub fn theorem3_calibration<T: Real>(p: &Theorem3Params<T>, lambda: T) -> Result<Theorem3Calibration<T>> {
    p.validate()?;
    positive("lambda", lambda)?;
    let prescribed = p.positive_targets(lambda);
    let [m, q, m4] = prescribed;
    let var = q - m * m;
    if !(var > T::zero()) {
        return Err(Error::InfeasibleCalibration(format!(
            "E[J+^2] = sigma2/lambda = {q} does not exceed E[J+]^2 = {}; increase lambda",
            m * m
        )));
    }
    let family = match p.calibration {
        Calibration::Gamma => JumpFamily::gamma(m * m / var, m / var)?,
        Calibration::InverseGaussian => JumpFamily::inverse_gaussian(m, m * m * m / var)?,
        Calibration::Beta => {
            let room = m * (T::one() - m);
            if !(m < T::one() && var < room) {
                return Err(Error::InfeasibleCalibration(format!(
                    "beta positive part needs Var(J+) = {var} < E[J+](1 - E[J+]) = {room}"
                )));
            }
            let common = room / var - T::one();
            JumpFamily::beta(m * common, (T::one() - m) * common)?
        }
    };
    let achieved = [family.moment(1), family.moment(2), family.moment(4)];
    Ok(Theorem3Calibration { lambda, family, prescribed, achieved, fourth_moment_feasible: m4 >= q * q })
}

/// Mixture with positive part from [`theorem3_calibration`], atom θₙ < 0 and
/// atom weight fₙ = λₙ^{−1+c₁}.
pub fn theorem3_mixture<T: Real>(p: &Theorem3Params<T>, lambda: T) -> Result<JumpFamily<T>> {
    let cal = theorem3_calibration(p, lambda)?;
    JumpFamily::mixture(cal.family, p.neg_value(lambda), p.neg_prob(lambda))
}

/// λₙE[Jₙᵏ], k = 1, 2, 4, of a mixture whose positive part has exactly the
/// prescribed moments, built from the moment identity of the mixture.
pub fn theorem3_prescribed_moments<T: Real>(p: &Theorem3Params<T>, lambda: T) -> [T; 3] {
    let targets = p.positive_targets(lambda);
    let (f, theta) = (p.neg_prob(lambda), p.neg_value(lambda));
    let keep = T::one() - f;
    [
        lambda * (keep * targets[0] + f * theta),
        lambda * (keep * targets[1] + f * theta * theta),
        lambda * (keep * targets[2] + f * theta.powi(4)),
    ]
}

/// Expanded closed forms of λₙE[Jₙᵏ], k = 1, 2, 4:
/// μ − λ^{−1+c₁+c₂};
/// σ² − σ²λ^{−1+c₁} + λ^{−c₁}(μ − λ^{c₂})²;
/// λ^{−c₃} − λ^{−1+c₁−c₃} + λ^{−3c₁}(μ − λ^{c₂})⁴.
pub fn theorem3_expansions<T: Real>(p: &Theorem3Params<T>, lambda: T) -> [T; 3] {
    let one = T::one();
    let (c1, c2, c3) = (p.c1, p.c2, p.c3);
    let d = p.mu - lambda.powf(c2);
    [
        p.mu - lambda.powf(-one + c1 + c2),
        p.sigma2 - p.sigma2 * lambda.powf(-one + c1) + lambda.powf(-c1) * d * d,
        lambda.powf(-c3) - lambda.powf(-one + c1 - c3) + lambda.powf(-T::lit(3.0) * c1) * d.powi(4),
    ]
}

/// (μ, σ²) = (λₙE[J], λₙE[J²]) in the leading-order forms of the parameter
/// tables: IG and Poisson drop the O(λₙ⁻¹) part of σ², the others are exact.
pub fn appendix_a_mapping<T: Real>(jump: &JumpFamily<T>, lambda: T) -> Result<(T, T)> {
    jump.validate()?;
    let one = T::one();
    Ok(match *jump {
        JumpFamily::Bernoulli { p } => (lambda * p, lambda * p),
        JumpFamily::Poisson { lam_tilde } => (lambda * lam_tilde, lambda * lam_tilde),
        JumpFamily::Gamma { shape, rate } => (lambda * shape / rate, lambda * shape * (one + shape) / (rate * rate)),
        JumpFamily::ChiSquare { k } => (lambda * k, T::lit(2.0) * lambda * k * (one + k * T::lit(0.5))),
        JumpFamily::InverseGaussian { mean, shape } => (lambda * mean, lambda * mean * mean * mean / shape),
        JumpFamily::Beta { shape_a, shape_b } => {
            (lambda * shape_a / shape_b, lambda * shape_a / (shape_b * (shape_b + one)))
        }
        JumpFamily::Exponential { theta } => (lambda * theta, T::lit(2.0) * lambda * theta * theta),
        JumpFamily::Degenerate { j } => (lambda * j, lambda * j * j),
        JumpFamily::Mixture { .. } => {
            return Err(Error::Unsupported("no parameter mapping for the mixture family".into()))
        }
    })
}

/// Subordinator whose Lévy measure is the limit of λₙ times the jump law.
pub fn limit_levy_density<T: Real>(seq: &FamilySequence<T>) -> Result<SubordinatorSpec<T>> {
    seq.validate()?;
    let ratio_sub = |mu: T, s: T| SubordinatorSpec::GammaProc { shape: mu * mu / s, rate: mu / s };
    match *seq {
        FamilySequence::Bernoulli { mu } | FamilySequence::Poisson { mu } => Ok(SubordinatorSpec::PoissonProc { mu }),
        FamilySequence::Gamma { mu, sigma_tilde2 } => Ok(ratio_sub(mu, sigma_tilde2)),
        FamilySequence::ChiSquare { mu } => Ok(ratio_sub(mu, T::lit(2.0) * mu)),
        FamilySequence::InverseGaussian { mu, sigma_tilde2 } => {
            Ok(SubordinatorSpec::IGProc { s: (mu * mu * mu / sigma_tilde2).sqrt(), b: (mu / sigma_tilde2).sqrt() })
        }
        FamilySequence::Beta { mu, beta } => Ok(SubordinatorSpec::BetaProc { mu, beta }),
        _ => Err(Error::Unsupported(format!("{} jumps have no Levy-OU limit", seq.kind()))),
    }
}

/// Below this both λₙf(x) and u(x) count as zero and the point is skipped.
pub const DENSITY_FLOOR: f64 = 1e-18;

/// Sup-relative distance between λₙ·f_{Jₙ} and the limit Lévy density over
/// `x_grid`, one value per λₙ.
///
/// Bernoulli and Poisson limits are an atom at 1; for them the value is
/// |λₙP(Jₙ = 1) − μ|/μ + λₙP(Jₙ ≥ 2)/μ.
pub fn verify_density_convergence<T: Real>(seq: &FamilySequence<T>, x_grid: &[T], lambda_grid: &[T]) -> Result<Vec<T>> {
    let sub = limit_levy_density(seq)?;
    let ln_floor = T::lit(DENSITY_FLOOR).ln();
    lambda_grid
        .iter()
        .map(|&lambda| {
            let jump = table1_family(seq, lambda)?;
            if let SubordinatorSpec::PoissonProc { mu } = sub {
                let at_one = jump.pdf_or_pmf(T::one())?;
                let at_zero = jump.pdf_or_pmf(T::zero())?;
                let beyond = (T::one() - at_zero - at_one).max(T::zero());
                return Ok(((lambda * at_one - mu).abs() + lambda * beyond) / mu);
            }
            let mut worst = T::zero();
            for &x in x_grid {
                let ln_lhs = lambda.ln() + jump.ln_pdf(x)?;
                let ln_rhs = sub.ln_levy_density(x)?;
                if ln_lhs < ln_floor && ln_rhs < ln_floor {
                    continue;
                }
                worst = worst.max((ln_lhs - ln_rhs).exp_m1().abs());
            }
            Ok(worst)
        })
        .collect()
}

/// Every nonnegative sequence row, at shared (μ, σ̃²); beta uses β = μ/σ̃²
/// and constant jumps appear under both scalings.
pub fn nonnegative_registry<T: Real>(mu: T, sigma_tilde2: T) -> Result<Vec<FamilySequence<T>>> {
    let all = vec![
        FamilySequence::Bernoulli { mu },
        FamilySequence::Poisson { mu },
        FamilySequence::Gamma { mu, sigma_tilde2 },
        FamilySequence::ChiSquare { mu },
        FamilySequence::InverseGaussian { mu, sigma_tilde2 },
        FamilySequence::beta_tied(mu, sigma_tilde2)?,
        FamilySequence::Exponential { mu },
        FamilySequence::Degenerate { scale: mu, scaling: DegenerateScaling::Mean },
        FamilySequence::Degenerate { scale: sigma_tilde2, scaling: DegenerateScaling::SecondMoment },
    ];
    for s in &all {
        s.validate()?;
    }
    Ok(all)
}

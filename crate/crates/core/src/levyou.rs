//! Lévy-driven OU limits dY = −αY dt + dL(t) with subordinators PP, GP, IGP
//! and BP, plus the Gaussian OU process.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::distributions::{cexpm1, JumpFamily};
use crate::error::{domain, invalid, Error, Result};
use crate::quad;
use crate::real::Real;
use crate::rng::RngStream;
use crate::sampling::{sample_inverse_gaussian, GammaSampler, Resolution};
use crate::shotnoise::{ShotNoiseParams, ShotSampler};
use crate::specfun::{self, erfc_cf_tail, erfcx, std_normal_cdf, SpecFunResult};

/// Background driving subordinator.
///
/// JSON form: `{"sub": "gp", "shape": 0.33, "rate": 0.33}`; tags `pp`, `gp`,
/// `igp`, `bp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sub")]
pub enum SubordinatorSpec<T> {
    /// Lévy measure μδ(x−1).
    #[serde(rename = "pp")]
    PoissonProc { mu: T },
    /// Lévy density α̃x⁻¹e^{−βx}; `shape` is α̃, `rate` is β.
    #[serde(rename = "gp")]
    GammaProc { shape: T, rate: T },
    /// Lévy density s·e^{−b²x/2}/√(2πx³).
    #[serde(rename = "igp")]
    IGProc { s: T, b: T },
    /// Lévy density μβx⁻¹(1−x)^{β−1} on (0,1).
    #[serde(rename = "bp")]
    BetaProc { mu: T, beta: T },
}

/// Tail value with the provenance of its evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue<T> {
    pub value: T,
    pub est_abs_error: T,
    /// The ₃F₂ behind U_BP had a convergence margin below 0.1; the value then
    /// comes from quadrature.
    pub divergence_risk: bool,
    pub by_quadrature: bool,
}

fn pos<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> SubordinatorSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PoissonProc { mu } => pos("mu", *mu),
            Self::GammaProc { shape, rate } => pos("shape", *shape).and(pos("rate", *rate)),
            Self::IGProc { s, b } => pos("s", *s).and(pos("b", *b)),
            Self::BetaProc { mu, beta } => pos("mu", *mu).and(pos("beta", *beta)),
        }
    }

    /// Short label used in classifications: PP, GP, IGP, BP.
    pub fn label(&self) -> &'static str {
        match self {
            Self::PoissonProc { .. } => "PP",
            Self::GammaProc { .. } => "GP",
            Self::IGProc { .. } => "IGP",
            Self::BetaProc { .. } => "BP",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PoissonProc { .. } => "PoissonProc",
            Self::GammaProc { .. } => "GammaProc",
            Self::IGProc { .. } => "IGProc",
            Self::BetaProc { .. } => "BetaProc",
        }
    }

    /// E[L(1)] = ∫x u(x)dx.
    pub fn increment_mean(&self) -> T {
        match self {
            Self::PoissonProc { mu } => *mu,
            Self::GammaProc { shape, rate } => *shape / *rate,
            Self::IGProc { s, b } => *s / *b,
            Self::BetaProc { mu, .. } => *mu,
        }
    }

    /// ∫x² u(x)dx, the variance rate of L.
    pub fn increment_msq(&self) -> T {
        match self {
            Self::PoissonProc { mu } => *mu,
            Self::GammaProc { shape, rate } => *shape / (*rate * *rate),
            Self::IGProc { s, b } => *s / (*b * *b * *b),
            Self::BetaProc { mu, beta } => *mu / (*beta + T::one()),
        }
    }

    /// Point mass of the Lévy measure as `(location, mass)`; PP only.
    pub fn atom(&self) -> Option<(T, T)> {
        match self {
            Self::PoissonProc { mu } => Some((T::one(), *mu)),
            _ => None,
        }
    }

    /// Lévy density u(x).
    pub fn levy_density(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(domain(format!("Levy density needs x > 0, got {x}")));
        }
        match self {
            Self::PoissonProc { .. } => {
                Err(Error::Unsupported("PoissonProc has an atom at 1, not a density; use atom()".into()))
            }
            Self::GammaProc { shape, rate } => Ok(*shape / x * (-*rate * x).exp()),
            Self::IGProc { s, b } => Ok(*s * (-*b * *b * x / T::lit(2.0)).exp() / (T::TAU() * x * x * x).sqrt()),
            Self::BetaProc { mu, beta } => {
                if !(x < T::one()) {
                    return Err(domain(format!("BetaProc density needs x < 1, got {x}")));
                }
                Ok(*mu * *beta / x * ((*beta - T::one()) * (-x).ln_1p()).exp())
            }
        }
    }

    /// ln u(x), for comparisons across many orders of magnitude.
    pub fn ln_levy_density(&self, x: T) -> Result<T> {
        match self {
            Self::GammaProc { shape, rate } if x > T::zero() => Ok(shape.ln() - x.ln() - *rate * x),
            Self::IGProc { s, b } if x > T::zero() => {
                Ok(s.ln() - *b * *b * x / T::lit(2.0) - T::lit(0.5) * (T::TAU() * x * x * x).ln())
            }
            Self::BetaProc { mu, beta } if x > T::zero() && x < T::one() => {
                Ok((*mu * *beta).ln() - x.ln() + (*beta - T::one()) * (-x).ln_1p())
            }
            _ => self.levy_density(x).map(|v| v.ln()),
        }
    }

    /// Lévy–Khinchin tail U(x) = ∫ₓ^∞ u(s)ds.
    pub fn levy_tail(&self, x: T) -> Result<T> {
        self.levy_tail_detailed(x).map(|t| t.value)
    }

    /// U(x) in closed form: α̃E₁(βx) for GP; for IGP
    /// s[√(2/(πx))e^{−b²x/2} − b·erfc(b√(x/2))]; for BP
    /// μβ{−ln x + (1−β)[₃F₂(1,1,2−β;2,2;1) − x·₃F₂(1,1,2−β;2,2;x)]}.
    /// BP falls back to quadrature when the ₃F₂ at 1 flags divergence risk.
    pub fn levy_tail_detailed(&self, x: T) -> Result<TailValue<T>> {
        if !(x > T::zero()) {
            return Err(domain(format!("Levy tail needs x > 0, got {x}")));
        }
        let closed = |r: SpecFunResult<T>, scale: T| TailValue {
            value: r.value * scale,
            est_abs_error: r.est_abs_error * scale.abs(),
            divergence_risk: false,
            by_quadrature: false,
        };
        match self {
            Self::PoissonProc { mu } => Ok(TailValue {
                value: if x < T::one() { *mu } else { T::zero() },
                est_abs_error: T::zero(),
                divergence_risk: false,
                by_quadrature: false,
            }),
            Self::GammaProc { shape, rate } => Ok(closed(specfun::ei1(*rate * x)?, *shape)),
            Self::IGProc { s, b } => {
                let z = *b * (x / T::lit(2.0)).sqrt();
                let sqrt_pi = T::PI().sqrt();
                // s·b·e^{−z²}[1/(z√π) − erfcx(z)]
                let bracket = if z < T::lit(2.0) {
                    (z * sqrt_pi).recip() - erfcx(z)
                } else {
                    let r = erfc_cf_tail(z);
                    r / (sqrt_pi * z * (z + r))
                };
                let value = *s * *b * (-z * z).exp() * bracket;
                Ok(TailValue {
                    value,
                    est_abs_error: value.abs() * T::lit(64.0) * T::epsilon(),
                    divergence_risk: false,
                    by_quadrature: false,
                })
            }
            Self::BetaProc { mu, beta } => {
                if !(x < T::one()) {
                    return Err(domain(format!("BetaProc tail needs x in (0,1), got {x}")));
                }
                let two = T::lit(2.0);
                let a3 = two - *beta;
                let at_one = specfun::hyp3f2(T::one(), T::one(), a3, two, two, T::one())?;
                if at_one.divergence_risk {
                    let mut t = self.beta_tail_quadrature(x)?;
                    t.divergence_risk = true;
                    return Ok(t);
                }
                let at_x = specfun::hyp3f2(T::one(), T::one(), a3, two, two, x)?;
                let c = T::one() - *beta;
                let value = *mu * *beta * (-x.ln() + c * (at_one.value - x * at_x.value));
                let err = *mu * *beta * c.abs() * (at_one.est_abs_error + x * at_x.est_abs_error)
                    + value.abs() * T::lit(16.0) * T::epsilon();
                Ok(TailValue { value, est_abs_error: err, divergence_risk: false, by_quadrature: false })
            }
        }
    }

    /// U_BP(x) by quadrature after the change of variables 1 − s = v^{1/β},
    /// which absorbs the endpoint singularity: U = μ∫₀^{(1−x)^β} dv/(1 − v^{1/β}).
    fn beta_tail_quadrature(&self, x: T) -> Result<TailValue<T>> {
        let Self::BetaProc { mu, beta } = self else {
            unreachable!("called for BetaProc only")
        };
        let upper = ((*beta) * (-x).ln_1p()).exp();
        let inv_beta = beta.recip();
        let q = quad::integrate(
            |v: T| {
                if v <= T::zero() {
                    return T::one();
                }
                let s = -(inv_beta * v.ln()).exp_m1();
                s.recip()
            },
            T::zero(),
            upper,
            T::lit(1e-15),
            T::lit(1e-13),
        )?;
        Ok(TailValue {
            value: *mu * q.value,
            est_abs_error: *mu * q.abs_error,
            divergence_risk: false,
            by_quadrature: true,
        })
    }

    /// Lévy exponent ψ(w) = ∫(e^{iwx} − 1)u(x)dx.
    ///
    /// GP: −α̃ln(1 − iw/β); IGP: s(b − √(b² − 2iw)) written as
    /// 2isw/(b + √(b² − 2iw)); PP: μ(e^{iw} − 1); BP: the series
    /// μβΣ_{n≥1}(iw)ⁿB(n,β)/n! for |w| ≤ 20, quadrature beyond. The
    /// arguments of ln and √ have real part ≥ 1 and b² respectively, so the
    /// principal branches are continuous along any real path of w.
    pub fn levy_exponent(&self, w: T) -> Result<Complex<T>> {
        let i = Complex::new(T::zero(), T::one());
        let one = Complex::new(T::one(), T::zero());
        Ok(match self {
            Self::PoissonProc { mu } => cexpm1(i * w) * *mu,
            Self::GammaProc { shape, rate } => {
                let arg = one - i * (w / *rate);
                debug_assert!(arg.re > T::zero());
                -arg.ln() * *shape
            }
            Self::IGProc { s, b } => {
                let arg = Complex::new(*b * *b, -T::lit(2.0) * w);
                debug_assert!(arg.re > T::zero());
                let root = arg.sqrt();
                i * (T::lit(2.0) * *s * w) / (root + *b)
            }
            Self::BetaProc { mu, beta } => {
                if w.abs() <= T::lit(20.0) {
                    // term_n = (iw)ⁿB(n,β)/n!, term_1 = iw/β
                    let mut term = i * (w / *beta);
                    let mut sum = term;
                    for n in 1..400usize {
                        let nf = T::from_usize_lossy(n);
                        term = term * i * (w * nf / ((nf + *beta) * (nf + T::one())));
                        sum = sum + term;
                        if term.norm() <= T::epsilon() * sum.norm() {
                            break;
                        }
                    }
                    sum * (*mu * *beta)
                } else {
                    let q = quad::integrate(
                        |x: T| {
                            if x <= T::zero() || x >= T::one() {
                                return Complex::new(T::zero(), T::zero());
                            }
                            let dens = *mu * *beta / x * ((*beta - T::one()) * (-x).ln_1p()).exp();
                            cexpm1(i * (w * x)) * dens
                        },
                        T::zero(),
                        T::one(),
                        T::lit(1e-12),
                        T::lit(1e-11),
                    )?;
                    q.value
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyOUParams<T> {
    pub alpha: T,
    pub y0: T,
    pub subordinator: SubordinatorSpec<T>,
}

impl<T: Real> LevyOUParams<T> {
    pub fn new(alpha: T, y0: T, subordinator: SubordinatorSpec<T>) -> Result<Self> {
        let p = Self { alpha, y0, subordinator };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        pos("alpha", self.alpha)?;
        if !(self.y0 >= T::zero() && self.y0.is_finite()) {
            return Err(invalid(format!("y0 must be nonnegative, got {}", self.y0)));
        }
        self.subordinator.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuMoments<T> {
    pub mean: T,
    pub variance: T,
    /// Cov(Y(t), Y(t+s)).
    pub covariance: T,
}

pub fn levyou_moments<T: Real>(params: &LevyOUParams<T>, t: T, s: T) -> OuMoments<T> {
    let a = params.alpha;
    let sub = &params.subordinator;
    let mean = sub.increment_mean() / a * -(-a * t).exp_m1() + params.y0 * (-a * t).exp();
    let variance = sub.increment_msq() / (T::lit(2.0) * a) * -(-(T::lit(2.0) * a * t)).exp_m1();
    OuMoments { mean, variance, covariance: variance * (-a * s).exp() }
}

/// E[e^{iuY(t)}] = exp(∫₀ᵗ ψ(u e^{−αv})dv + iu y₀e^{−αt}), integrated in
/// w = e^{−αv}.
pub fn levyou_char_fn<T: Real>(params: &LevyOUParams<T>, t: T, u: T) -> Result<Complex<T>> {
    if u == T::zero() {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let a = params.alpha;
    let lower = (-a * t).exp();
    let sub = &params.subordinator;
    let mut failure = None;
    let q = quad::integrate(
        |w: T| match sub.levy_exponent(u * w) {
            Ok(c) => c / w,
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        },
        lower,
        T::one(),
        T::lit(1e-10) * a,
        T::lit(1e-12),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut exponent = q.value / a;
    exponent.im = exponent.im + u * params.y0 * lower;
    if exponent.re > T::zero() && exponent.re < T::lit(1e-9) {
        exponent.re = T::zero();
    }
    Ok(exponent.exp())
}

/// Poisson draw for small means by counting unit-rate arrivals.
fn small_poisson(mean: f64, rng: &mut RngStream) -> u64 {
    let mut n = 0;
    let mut acc = rng.exp1();
    while acc <= mean {
        n += 1;
        acc += rng.exp1();
    }
    n
}

/// Expected compound-Poisson jumps per OU-Gamma/OU-IG sub-step.
const JUMPS_PER_STEP: f64 = 8.0;

/// Exact draw of Y(t+dt) given Y(t) = y0 for OU-Gamma.
///
/// With K = e^{αh}, Y(t+h) = y0/K + G + Σ_{k≤N} Eₖ/(βe^{αhUₖ}), where
/// G ~ Gamma(α̃h, rate βK), N ~ Poisson(α̃αh²/2), Eₖ ~ Exp(1), and Uₖ with
/// density 2u on (0,1) (the jump-time/rate pair is uniform on a triangle).
/// Long steps are split into Markov sub-steps h so that N stays small.
pub fn ou_gamma_transition(y0: f64, dt: f64, alpha: f64, spec: &SubordinatorSpec<f64>, rng: &mut RngStream) -> Result<f64> {
    let SubordinatorSpec::GammaProc { shape, rate } = *spec else {
        return Err(invalid(format!("ou_gamma_transition needs GammaProc, got {}", spec.name())));
    };
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let h_max = (2.0 * JUMPS_PER_STEP / (shape * alpha)).sqrt();
    let steps = (dt / h_max).ceil().max(1.0) as usize;
    let h = dt / steps as f64;
    let gamma = GammaSampler::new(shape * h, (-alpha * h).exp() / rate)?;
    let cp_mean = shape * alpha * h * h / 2.0;
    let decay = (-alpha * h).exp();
    let mut y = y0;
    for _ in 0..steps {
        let mut next = y * decay + gamma.sample(rng);
        for _ in 0..small_poisson(cp_mean, rng) {
            let u = rng.open01().sqrt();
            next += rng.exp1() / (rate * (alpha * h * u).exp());
        }
        y = next;
    }
    Ok(y)
}

/// Exact draw of Y(t+dt) given Y(t) = y0 for OU-IG.
///
/// With M = e^{αh/2}: Y(t+h) = y0e^{−αh} + I + Σ_{k≤N} Zₖ²/(b²Xₖ²), where
/// I ~ IG(mean s'/b', shape s'²), s' = 2s(1 − 1/M)/α, b' = bM;
/// N ~ Poisson((sb/α)(2(M − 1) − αh)); Zₖ standard normal and Xₖ on [1, M]
/// with density ∝ 1 − 1/x.
pub fn ou_ig_transition(y0: f64, dt: f64, alpha: f64, spec: &SubordinatorSpec<f64>, rng: &mut RngStream) -> Result<f64> {
    let SubordinatorSpec::IGProc { s, b } = *spec else {
        return Err(invalid(format!("ou_ig_transition needs IGProc, got {}", spec.name())));
    };
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let cp_rate = |h: f64| {
        let y = alpha * h / 2.0;
        // 2(e^y − 1) − 2y without cancellation
        let excess = if y < 1e-3 { y * y * (1.0 + y / 3.0 + y * y / 12.0) } else { 2.0 * (y.exp_m1() - y) };
        s * b / alpha * excess
    };
    let mut steps = 1usize;
    while cp_rate(dt / steps as f64) > JUMPS_PER_STEP {
        steps *= 2;
    }
    let h = dt / steps as f64;
    let m_half = (alpha * h / 2.0).exp();
    let s1 = -2.0 * s * (-alpha * h / 2.0).exp_m1() / alpha;
    let b1 = b * m_half;
    let ig_mean = s1 / b1;
    let ig_shape = s1 * s1;
    let lam = cp_rate(h);
    let decay = (-alpha * h).exp();
    let b2 = b * b;
    let mut y = y0;
    for _ in 0..steps {
        let mut next = y * decay + sample_inverse_gaussian(ig_mean, ig_shape, rng);
        for _ in 0..small_poisson(lam, rng) {
            let x = sample_one_minus_inv(m_half, rng);
            let z = rng.std_normal();
            next += z * z / (b2 * x * x);
        }
        y = next;
    }
    Ok(y)
}

/// Draw on [1, m] from the density ∝ 1 − 1/x.
fn sample_one_minus_inv(m: f64, rng: &mut RngStream) -> f64 {
    loop {
        if m <= 2.0 {
            // envelope ∝ x − 1, acceptance 1/x
            let x = 1.0 + (m - 1.0) * rng.open01().sqrt();
            if rng.open01() * x <= 1.0 {
                return x;
            }
        } else {
            let x = 1.0 + (m - 1.0) * rng.open01();
            if rng.open01() <= 1.0 - 1.0 / x {
                return x;
            }
        }
    }
}

/// Exact sampler of a Lévy-driven OU process (PP, GP, IGP only).
#[derive(Debug, Clone)]
pub enum LevyOuSampler {
    /// OU-Poisson as shot noise with unit jumps at rate μ.
    Poisson(ShotSampler),
    Transition { params: LevyOUParams<f64> },
}

impl LevyOuSampler {
    pub fn new(params: &LevyOUParams<f64>) -> Result<Self> {
        params.validate()?;
        match params.subordinator {
            SubordinatorSpec::PoissonProc { mu } => {
                let shot = ShotNoiseParams::new(mu, params.alpha, params.y0, JumpFamily::Degenerate { j: 1.0 })?;
                Ok(Self::Poisson(ShotSampler::new(&shot, Resolution::Exact)?))
            }
            SubordinatorSpec::GammaProc { .. } | SubordinatorSpec::IGProc { .. } => {
                Ok(Self::Transition { params: params.clone() })
            }
            SubordinatorSpec::BetaProc { .. } => Err(Error::NoExactSampler("BetaProc".into())),
        }
    }

    fn step(params: &LevyOUParams<f64>, y: f64, dt: f64, rng: &mut RngStream) -> f64 {
        let r = match params.subordinator {
            SubordinatorSpec::GammaProc { .. } => ou_gamma_transition(y, dt, params.alpha, &params.subordinator, rng),
            _ => ou_ig_transition(y, dt, params.alpha, &params.subordinator, rng),
        };
        r.expect("parameters validated at construction")
    }

    /// Y(t) started from y₀ at time 0.
    pub fn sample_at(&self, t: f64, rng: &mut RngStream) -> f64 {
        match self {
            Self::Poisson(s) => s.sample_at(t, rng),
            Self::Transition { params } => {
                if t == 0.0 {
                    params.y0
                } else {
                    Self::step(params, params.y0, t, rng)
                }
            }
        }
    }

    pub fn sample_grid(&self, grid: &[f64], rng: &mut RngStream) -> Vec<f64> {
        match self {
            Self::Poisson(s) => s.sample_grid(grid, rng),
            Self::Transition { params } => {
                let mut out = Vec::with_capacity(grid.len());
                let (mut now, mut y) = (0.0, params.y0);
                for &g in grid {
                    if g > now {
                        y = Self::step(params, y, g - now, rng);
                        now = g;
                    }
                    out.push(y);
                }
                out
            }
        }
    }
}

/// Gaussian OU dY = (μ − αY)dt + σdW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianOUParams<T> {
    /// Drift scale, the limit of λE[J].
    pub mu: T,
    /// Diffusion coefficient σ², the limit of λE[J²].
    pub sigma2: T,
    pub alpha: T,
    pub y0: T,
}

impl<T: Real> GaussianOUParams<T> {
    pub fn new(mu: T, sigma2: T, alpha: T, y0: T) -> Result<Self> {
        let p = Self { mu, sigma2, alpha, y0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        pos("sigma2", self.sigma2)?;
        pos("alpha", self.alpha)?;
        if !self.mu.is_finite() || !self.y0.is_finite() {
            return Err(invalid("mu and y0 must be finite"));
        }
        Ok(())
    }

    pub fn mean(&self, t: T) -> T {
        self.mu / self.alpha * -(-self.alpha * t).exp_m1() + self.y0 * (-self.alpha * t).exp()
    }

    pub fn variance(&self, t: T) -> T {
        self.sigma2 / (T::lit(2.0) * self.alpha) * -(-(T::lit(2.0) * self.alpha * t)).exp_m1()
    }

    /// Cov(Y(t), Y(t+s)).
    pub fn covariance(&self, t: T, s: T) -> T {
        self.variance(t) * (-self.alpha * s).exp()
    }

    /// Density of Y(t); `None` at t = 0 where the law is the point mass y₀.
    pub fn density(&self, t: T, x: T) -> Option<T> {
        let v = self.variance(t);
        if !(v > T::zero()) {
            return None;
        }
        let d = x - self.mean(t);
        Some((-d * d / (T::lit(2.0) * v)).exp() / (T::TAU() * v).sqrt())
    }

    pub fn cdf(&self, t: T, x: T) -> T {
        let v = self.variance(t);
        if !(v > T::zero()) {
            return if x >= self.y0 { T::one() } else { T::zero() };
        }
        std_normal_cdf((x - self.mean(t)) / v.sqrt())
    }

    /// P(Y(t) ≥ 0) = 1 − Φ(−mean/√variance).
    pub fn nonneg_prob(&self, t: T) -> T {
        let v = self.variance(t);
        if !(v > T::zero()) {
            return if self.y0 >= T::zero() { T::one() } else { T::zero() };
        }
        std_normal_cdf(self.mean(t) / v.sqrt())
    }

    pub fn char_fn(&self, t: T, u: T) -> Complex<T> {
        Complex::new(-u * u * self.variance(t) / T::lit(2.0), u * self.mean(t)).exp()
    }
}

impl GaussianOUParams<f64> {
    /// Exact draw of Y(t+dt) given Y(t) = y0.
    pub fn transition_sample(&self, y0: f64, dt: f64, rng: &mut RngStream) -> f64 {
        let moved = Self { y0, ..self.clone() };
        moved.mean(dt) + moved.variance(dt).sqrt() * rng.std_normal()
    }
}

//! Samplers for jump amplitudes and the event streams built on them.
//!
//! An [`EventSource`] turns a jump law and a base rate λ into a Poisson
//! stream of *nonzero* events: zero-valued jumps (Bernoulli misses, Poisson
//! zeros) are removed by exact thinning, which keeps path simulation cheap
//! when p or λ̃ is tiny. For gamma and beta laws of vanishing shape an
//! optional resolution floor drops jumps smaller than `floor · E[J]`; with
//! the default floor of 1e-18 the removed mass is below double precision
//! relative to the process value.

use rand_distr::{Distribution, Gamma, Poisson};

use crate::distributions::JumpFamily;
use crate::error::{invalid, Result};
use crate::rng::RngStream;
use crate::specfun::ln_gamma;

/// Relative resolution floor used by the ensemble samplers.
pub const DEFAULT_RESOLUTION: f64 = 1e-18;

/// Direct sampler for a jump law.
#[derive(Debug, Clone)]
pub enum JumpSampler {
    Const(f64),
    Bernoulli(f64),
    Poisson(Poisson<f64>),
    Exponential(f64),
    Gamma(GammaSampler),
    InverseGaussian { mean: f64, shape: f64 },
    Beta { a: GammaSampler, b: GammaSampler },
    Mixture { pos: Box<JumpSampler>, neg_value: f64, neg_prob: f64 },
}

/// Gamma(shape, scale) sampler that stays finite in log space for tiny
/// shapes.
#[derive(Debug, Clone)]
pub struct GammaSampler {
    shape: f64,
    scale: f64,
    inner: Gamma<f64>,
}

impl GammaSampler {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        // shapes below one are drawn as Gamma(1+a)·U^{1/a}
        let base = if shape < 1.0 { shape + 1.0 } else { shape };
        let inner = Gamma::new(base, 1.0).map_err(|e| invalid(format!("gamma sampler: {e}")))?;
        Ok(Self { shape, scale, inner })
    }

    /// ln of a Gamma(shape, 1) draw.
    #[inline]
    pub fn sample_ln_unit(&self, rng: &mut RngStream) -> f64 {
        let g = self.inner.sample(rng);
        if self.shape < 1.0 {
            g.ln() + rng.open01().ln() / self.shape
        } else {
            g.ln()
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        if self.shape < 1.0 {
            self.sample_ln_unit(rng).exp() * self.scale
        } else {
            self.inner.sample(rng) * self.scale
        }
    }
}

/// Inverse Gaussian draw by the transformation-with-rejection method,
/// arranged so that no difference of nearly equal numbers occurs even
/// when shape ≪ mean.
#[inline]
pub fn sample_inverse_gaussian(mean: f64, shape: f64, rng: &mut RngStream) -> f64 {
    let n = rng.std_normal();
    let z = mean * n * n / (2.0 * shape);
    // smaller root m(1 + z − √(z² + 2z)) = m / (1 + z + √(z(z+2)))
    let x1 = mean / (1.0 + z + z.sqrt() * (z + 2.0).sqrt());
    if rng.open01() * (mean + x1) <= mean {
        x1
    } else {
        mean * (mean / x1)
    }
}

impl JumpSampler {
    pub fn new(family: &JumpFamily<f64>) -> Result<Self> {
        family.validate()?;
        Ok(match family {
            JumpFamily::Degenerate { j } => Self::Const(*j),
            JumpFamily::Bernoulli { p } => Self::Bernoulli(*p),
            JumpFamily::Poisson { lam_tilde } => {
                Self::Poisson(Poisson::new(*lam_tilde).map_err(|e| invalid(format!("poisson sampler: {e}")))?)
            }
            JumpFamily::Exponential { theta } => Self::Exponential(*theta),
            JumpFamily::Gamma { shape, rate } => Self::Gamma(GammaSampler::new(*shape, 1.0 / rate)?),
            JumpFamily::ChiSquare { k } => Self::Gamma(GammaSampler::new(0.5 * k, 2.0)?),
            JumpFamily::InverseGaussian { mean, shape } => Self::InverseGaussian { mean: *mean, shape: *shape },
            JumpFamily::Beta { shape_a, shape_b } => Self::Beta {
                a: GammaSampler::new(*shape_a, 1.0)?,
                b: GammaSampler::new(*shape_b, 1.0)?,
            },
            JumpFamily::Mixture { pos, neg_value, neg_prob } => Self::Mixture {
                pos: Box::new(Self::new(pos)?),
                neg_value: *neg_value,
                neg_prob: *neg_prob,
            },
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::Const(j) => *j,
            Self::Bernoulli(p) => {
                if rng.open01() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Poisson(d) => d.sample(rng),
            Self::Exponential(theta) => rng.exp1() * theta,
            Self::Gamma(g) => g.sample(rng),
            Self::InverseGaussian { mean, shape } => sample_inverse_gaussian(*mean, *shape, rng),
            Self::Beta { a, b } => {
                // X/(X+Y) = 1/(1 + e^{ln Y − ln X})
                let lx = a.sample_ln_unit(rng);
                let ly = b.sample_ln_unit(rng);
                1.0 / (1.0 + (ly - lx).exp())
            }
            Self::Mixture { pos, neg_value, neg_prob } => {
                if rng.open01() < *neg_prob {
                    *neg_value
                } else {
                    pos.sample(rng)
                }
            }
        }
    }
}

/// Draws `n` i.i.d. jumps.
pub fn sample_jump(family: &JumpFamily<f64>, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
    let s = JumpSampler::new(family)?;
    Ok((0..n).map(|_| s.sample(rng)).collect())
}

/// How small jumps are treated by an [`EventSource`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    /// Every jump of the law is generated.
    Exact,
    /// Jumps below `floor · E[J]` are dropped for gamma/beta/χ² laws when
    /// that removes most events.
    Floor(f64),
}

#[derive(Debug, Clone)]
enum Draw {
    Const(f64),
    ZeroTruncatedPoisson { lam: f64, first: f64 },
    Direct(JumpSampler),
    GammaEnvelope(GammaEnvelope),
    BetaEnvelope(BetaEnvelope),
}

/// Poisson stream of jump events for a given law; events arrive at rate
/// `rate_factor · λ`, each with amplitude from [`EventSource::draw`]. A
/// `None` amplitude is a rejected candidate and must be skipped.
#[derive(Debug, Clone)]
pub struct EventSource {
    pub rate_factor: f64,
    draw: Draw,
}

impl EventSource {
    pub fn new(family: &JumpFamily<f64>, resolution: Resolution) -> Result<Self> {
        family.validate()?;
        let direct = |f: &JumpFamily<f64>| -> Result<Self> {
            Ok(Self { rate_factor: 1.0, draw: Draw::Direct(JumpSampler::new(f)?) })
        };
        match family {
            JumpFamily::Degenerate { j } => Ok(Self {
                rate_factor: if *j == 0.0 { 0.0 } else { 1.0 },
                draw: Draw::Const(*j),
            }),
            JumpFamily::Bernoulli { p } => Ok(Self { rate_factor: *p, draw: Draw::Const(1.0) }),
            JumpFamily::Poisson { lam_tilde } if *lam_tilde <= 1.0 => {
                let q = -(-lam_tilde).exp_m1();
                Ok(Self {
                    rate_factor: q,
                    draw: Draw::ZeroTruncatedPoisson { lam: *lam_tilde, first: lam_tilde * (-lam_tilde).exp() / q },
                })
            }
            JumpFamily::Gamma { shape, rate } => match resolution {
                Resolution::Floor(floor) if *shape < 1.0 => {
                    let env = GammaEnvelope::new(*shape, *rate, floor);
                    if env.rate_factor < 0.5 {
                        Ok(Self { rate_factor: env.rate_factor, draw: Draw::GammaEnvelope(env) })
                    } else {
                        direct(family)
                    }
                }
                _ => direct(family),
            },
            JumpFamily::ChiSquare { k } => {
                Self::new(&JumpFamily::Gamma { shape: 0.5 * k, rate: 0.5 }, resolution)
            }
            JumpFamily::Beta { shape_a, shape_b } => match resolution {
                Resolution::Floor(floor) if *shape_a < 1.0 => {
                    let env = BetaEnvelope::new(*shape_a, *shape_b, floor);
                    if env.rate_factor < 0.5 {
                        Ok(Self { rate_factor: env.rate_factor, draw: Draw::BetaEnvelope(env) })
                    } else {
                        direct(family)
                    }
                }
                _ => direct(family),
            },
            _ => direct(family),
        }
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> Option<f64> {
        match &self.draw {
            Draw::Const(j) => Some(*j),
            Draw::ZeroTruncatedPoisson { lam, first } => {
                let u = rng.open01();
                let mut k = 1.0;
                let mut p = *first;
                let mut cum = p;
                while u > cum && p > 0.0 {
                    k += 1.0;
                    p *= lam / k;
                    cum += p;
                }
                Some(k)
            }
            Draw::Direct(s) => Some(s.sample(rng)),
            Draw::GammaEnvelope(e) => e.draw(rng),
            Draw::BetaEnvelope(e) => e.draw(rng),
        }
    }
}

/// Candidate generator for Gamma(a, rate) restricted to x ≥ δ, δ = floor·a/rate.
/// In y = rate·x the density y^{a−1}e^{−y}/Γ(a) is dominated by y^{a−1}
/// on [y₀, 1) and by e^{−y} on [1, ∞).
#[derive(Debug, Clone)]
struct GammaEnvelope {
    a: f64,
    scale: f64,
    left_mass: f64,
    p_left: f64,
    rate_factor: f64,
}

impl GammaEnvelope {
    fn new(a: f64, rate: f64, floor: f64) -> Self {
        let y0 = floor * a;
        // 1 − y0^a, kept accurate for tiny a
        let left_mass = -(a * y0.ln()).exp_m1();
        let m_left = left_mass / a;
        let m_right = (-1.0_f64).exp();
        // 1/Γ(a) = a/Γ(1+a)
        let inv_gamma = a * (-ln_gamma(1.0 + a)).exp();
        Self {
            a,
            scale: 1.0 / rate,
            left_mass,
            p_left: m_left / (m_left + m_right),
            rate_factor: (m_left + m_right) * inv_gamma,
        }
    }

    #[inline]
    fn draw(&self, rng: &mut RngStream) -> Option<f64> {
        if rng.open01() < self.p_left {
            let u = rng.open01();
            let ln_y = (-self.left_mass * u).ln_1p() / self.a;
            let y = ln_y.exp();
            if rng.open01() < (-y).exp() {
                Some(y * self.scale)
            } else {
                None
            }
        } else {
            let y = 1.0 + rng.exp1();
            if rng.open01() < y.powf(self.a - 1.0) {
                Some(y * self.scale)
            } else {
                None
            }
        }
    }
}

/// Candidate generator for Beta(a, b) restricted to x ≥ δ = floor·a/(a+b):
/// envelope K_L·x^{a−1} on [δ, 1/2) and 2^{1−a}(1−x)^{b−1} on [1/2, 1).
#[derive(Debug, Clone)]
struct BetaEnvelope {
    a: f64,
    b: f64,
    left_mass: f64,
    k_left: f64,
    k_right: f64,
    p_left: f64,
    rate_factor: f64,
}

impl BetaEnvelope {
    fn new(a: f64, b: f64, floor: f64) -> Self {
        let delta = floor * a / (a + b);
        let k_left = if b >= 1.0 { 1.0 } else { 2f64.powf(1.0 - b) };
        let k_right = 2f64.powf(1.0 - a);
        // 1 − (2δ)^a
        let left_mass = -(a * (2.0 * delta).ln()).exp_m1();
        let m_left = k_left * 0.5f64.powf(a) * left_mass / a;
        let m_right = k_right * 0.5f64.powf(b) / b;
        // 1/B(a,b) = a·Γ(a+b)/(Γ(1+a)Γ(b))
        let inv_beta = a * (ln_gamma(a + b) - ln_gamma(1.0 + a) - ln_gamma(b)).exp();
        Self {
            a,
            b,
            left_mass,
            k_left,
            k_right,
            p_left: m_left / (m_left + m_right),
            rate_factor: (m_left + m_right) * inv_beta,
        }
    }

    #[inline]
    fn draw(&self, rng: &mut RngStream) -> Option<f64> {
        if rng.open01() < self.p_left {
            let u = rng.open01();
            let ln_x = 0.5f64.ln() + (-self.left_mass * u).ln_1p() / self.a;
            let x = ln_x.exp();
            if rng.open01() * self.k_left < ((self.b - 1.0) * (-x).ln_1p()).exp() {
                Some(x)
            } else {
                None
            }
        } else {
            let z = 0.5 * rng.open01().powf(1.0 / self.b);
            let x = 1.0 - z;
            if rng.open01() * self.k_right < x.powf(self.a - 1.0) {
                Some(x)
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn degenerate_and_bernoulli_zero() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_jump(&JumpFamily::degenerate(2.0).unwrap(), &mut rng, 3).unwrap(), vec![2.0; 3]);
        let zeros = sample_jump(&JumpFamily::bernoulli(0.0).unwrap(), &mut rng, 100).unwrap();
        assert!(zeros.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gamma_sample_mean() {
        let mut rng = RngStream::new(11, 0);
        let xs = sample_jump(&JumpFamily::gamma(1.0, 2.0).unwrap(), &mut rng, 1_000_000).unwrap();
        let (m, v) = mean_var(&xs);
        assert!((m - 0.5).abs() < 4.0 * (v / 1e6).sqrt());
    }

    #[test]
    fn inverse_gaussian_tiny_shape_is_stable() {
        // mean 1e-4, shape 1e-12: the textbook formula loses every digit here
        let mut rng = RngStream::new(5, 0);
        let f = JumpFamily::inverse_gaussian(1e-4, 1e-12).unwrap();
        let xs = sample_jump(&f, &mut rng, 200_000).unwrap();
        assert!(xs.iter().all(|x| x.is_finite() && *x > 0.0));
        // the median of IG(m, l) for l ≪ m is ≈ 2.198·l
        let mut s = xs.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = s[s.len() / 2];
        assert!((med / 1e-12 - 2.198).abs() < 0.1, "median {med}");
    }

    #[test]
    fn zero_truncated_poisson_stream() {
        let f = JumpFamily::poisson(0.3).unwrap();
        let src = EventSource::new(&f, Resolution::Exact).unwrap();
        assert!((src.rate_factor - (1.0 - (-0.3f64).exp())).abs() < 1e-15);
        let mut rng = RngStream::new(3, 0);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| src.draw(&mut rng).unwrap()).collect();
        let (m, v) = mean_var(&xs);
        let expect = 0.3 / src.rate_factor;
        assert!((m - expect).abs() < 4.0 * (v / n as f64).sqrt());
        assert!(xs.iter().all(|&x| x >= 1.0));
    }

    fn thinned_mean(f: &JumpFamily<f64>, candidates: usize, seed: u64) -> (f64, f64, f64) {
        let src = EventSource::new(f, Resolution::Floor(DEFAULT_RESOLUTION)).unwrap();
        let mut rng = RngStream::new(seed, 0);
        // E[J] = rate_factor · E[draw or 0]
        let xs: Vec<f64> = (0..candidates).map(|_| src.draw(&mut rng).unwrap_or(0.0) * src.rate_factor).collect();
        let (m, v) = mean_var(&xs);
        (m, (v / candidates as f64).sqrt(), src.rate_factor)
    }

    #[test]
    fn gamma_envelope_preserves_moments() {
        let f = JumpFamily::gamma(1e-4, 1.0 / 3.0).unwrap();
        let (m, se, q) = thinned_mean(&f, 2_000_000, 9);
        assert!(q < 0.01);
        assert!((m - f.mean()).abs() < 4.0 * se, "{m} vs {}", f.mean());
    }

    #[test]
    fn beta_envelope_preserves_moments() {
        let f = JumpFamily::beta(1e-4, 2.0).unwrap();
        let (m, se, q) = thinned_mean(&f, 2_000_000, 10);
        assert!(q < 0.01);
        assert!((m - f.mean()).abs() < 4.0 * se, "{m} vs {}", f.mean());
        let f = JumpFamily::beta(1e-3, 0.5).unwrap();
        let (m, se, _) = thinned_mean(&f, 2_000_000, 12);
        assert!((m - f.mean()).abs() < 4.0 * se, "{m} vs {}", f.mean());
    }
}

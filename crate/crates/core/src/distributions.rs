//! Jump-amplitude families: validation, raw moments, densities and
//! characteristic functions. Samplers live in [`crate::sampling`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::quad;
use crate::real::Real;
use crate::specfun::ln_gamma;

/// Distribution of a single jump amplitude.
///
/// JSON form: `{"family": "gamma", "shape": 0.5, "rate": 2.0}`. Tags are
/// `degenerate`, `bernoulli`, `poisson`, `exponential`, `gamma`, `chisq`,
/// `ig`, `beta` and `mixture` (with a nested `pos` object).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpFamily<T> {
    Degenerate { j: T },
    Bernoulli { p: T },
    Poisson { lam_tilde: T },
    Exponential { theta: T },
    Gamma { shape: T, rate: T },
    #[serde(rename = "chisq")]
    ChiSquare { k: T },
    #[serde(rename = "ig")]
    InverseGaussian { mean: T, shape: T },
    Beta { shape_a: T, shape_b: T },
    /// Positive part `pos` with probability `1 - neg_prob`, the atom
    /// `neg_value ≤ 0` with probability `neg_prob`.
    Mixture { pos: Box<JumpFamily<T>>, neg_value: T, neg_prob: T },
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn probability<T: Real>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0,1], got {v}")))
    }
}

/// exp(z) − 1 without cancellation for small |z|.
pub(crate) fn cexpm1<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    let half_sin = (y * T::lit(0.5)).sin();
    let cos_m1 = -T::lit(2.0) * half_sin * half_sin;
    let em1 = x.exp_m1();
    Complex::new(em1 * y.cos() + cos_m1, x.exp() * y.sin())
}

impl<T: Real> JumpFamily<T> {
    pub fn degenerate(j: T) -> Result<Self> {
        if !j.is_finite() {
            return Err(invalid("degenerate value must be finite"));
        }
        Ok(Self::Degenerate { j })
    }

    pub fn bernoulli(p: T) -> Result<Self> {
        probability("p", p)?;
        Ok(Self::Bernoulli { p })
    }

    pub fn poisson(lam_tilde: T) -> Result<Self> {
        positive("lam_tilde", lam_tilde)?;
        Ok(Self::Poisson { lam_tilde })
    }

    pub fn exponential(theta: T) -> Result<Self> {
        positive("theta", theta)?;
        Ok(Self::Exponential { theta })
    }

    pub fn gamma(shape: T, rate: T) -> Result<Self> {
        positive("shape", shape)?;
        positive("rate", rate)?;
        Ok(Self::Gamma { shape, rate })
    }

    pub fn chi_square(k: T) -> Result<Self> {
        positive("k", k)?;
        Ok(Self::ChiSquare { k })
    }

    pub fn inverse_gaussian(mean: T, shape: T) -> Result<Self> {
        positive("mean", mean)?;
        positive("shape", shape)?;
        Ok(Self::InverseGaussian { mean, shape })
    }

    pub fn beta(shape_a: T, shape_b: T) -> Result<Self> {
        positive("shape_a", shape_a)?;
        positive("shape_b", shape_b)?;
        Ok(Self::Beta { shape_a, shape_b })
    }

    pub fn mixture(pos: JumpFamily<T>, neg_value: T, neg_prob: T) -> Result<Self> {
        pos.validate()?;
        if !pos.is_nonnegative() {
            return Err(invalid("mixture positive part must be a nonnegative family"));
        }
        if !(neg_value <= T::zero()) || !neg_value.is_finite() {
            return Err(invalid(format!("neg_value must be <= 0, got {neg_value}")));
        }
        probability("neg_prob", neg_prob)?;
        Ok(Self::Mixture { pos: Box::new(pos), neg_value, neg_prob })
    }

    /// Re-checks the constructor invariants (useful after deserializing).
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Degenerate { j } => Self::degenerate(*j).map(|_| ()),
            Self::Bernoulli { p } => probability("p", *p),
            Self::Poisson { lam_tilde } => positive("lam_tilde", *lam_tilde),
            Self::Exponential { theta } => positive("theta", *theta),
            Self::Gamma { shape, rate } => positive("shape", *shape).and(positive("rate", *rate)),
            Self::ChiSquare { k } => positive("k", *k),
            Self::InverseGaussian { mean, shape } => positive("mean", *mean).and(positive("shape", *shape)),
            Self::Beta { shape_a, shape_b } => positive("shape_a", *shape_a).and(positive("shape_b", *shape_b)),
            Self::Mixture { pos, neg_value, neg_prob } => {
                Self::mixture((**pos).clone(), *neg_value, *neg_prob).map(|_| ())
            }
        }
    }

    /// Lower-case tag as used in JSON and CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Degenerate { .. } => "degenerate",
            Self::Bernoulli { .. } => "bernoulli",
            Self::Poisson { .. } => "poisson",
            Self::Exponential { .. } => "exponential",
            Self::Gamma { .. } => "gamma",
            Self::ChiSquare { .. } => "chisq",
            Self::InverseGaussian { .. } => "ig",
            Self::Beta { .. } => "beta",
            Self::Mixture { .. } => "mixture",
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Self::Degenerate { j } => *j >= T::zero(),
            Self::Mixture { neg_value, neg_prob, .. } => *neg_prob == T::zero() || *neg_value == T::zero(),
            _ => true,
        }
    }

    /// True for families with a Lebesgue density (the Mixture's positive part
    /// counts).
    pub fn is_continuous(&self) -> bool {
        match self {
            Self::Exponential { .. }
            | Self::Gamma { .. }
            | Self::ChiSquare { .. }
            | Self::InverseGaussian { .. }
            | Self::Beta { .. } => true,
            Self::Mixture { pos, .. } => pos.is_continuous(),
            _ => false,
        }
    }

    /// Raw moment E[J^k] for k in 1..=4.
    pub fn moment(&self, k: u32) -> T {
        assert!((1..=4).contains(&k), "moment order must be 1..=4, got {k}");
        let kf = T::from_u32(k).expect("small integer");
        match self {
            Self::Degenerate { j } => j.powi(k as i32),
            Self::Bernoulli { p } => *p,
            Self::Poisson { lam_tilde: l } => {
                let l = *l;
                match k {
                    1 => l,
                    2 => l + l * l,
                    3 => l * (T::one() + l * (T::lit(3.0) + l)),
                    _ => l * (T::one() + l * (T::lit(7.0) + l * (T::lit(6.0) + l))),
                }
            }
            Self::Exponential { theta } => {
                let fact = (1..=k).fold(T::one(), |acc, i| acc * T::from_u32(i).expect("small"));
                fact * theta.powi(k as i32)
            }
            Self::Gamma { shape, rate } => {
                let rising = (0..k).fold(T::one(), |acc, i| acc * (*shape + T::from_u32(i).expect("small")));
                rising / rate.powf(kf)
            }
            Self::ChiSquare { k: dof } => {
                Self::Gamma { shape: *dof * T::lit(0.5), rate: T::lit(0.5) }.moment(k)
            }
            Self::InverseGaussian { mean: m, shape: l } => {
                let (m, r) = (*m, *m / *l);
                let mk = m.powi(k as i32);
                match k {
                    1 => m,
                    2 => mk * (T::one() + r),
                    3 => mk * (T::one() + r * (T::lit(3.0) + T::lit(3.0) * r)),
                    _ => mk * (T::one() + r * (T::lit(6.0) + r * (T::lit(15.0) + T::lit(15.0) * r))),
                }
            }
            Self::Beta { shape_a: a, shape_b: b } => (0..k).fold(T::one(), |acc, i| {
                let i = T::from_u32(i).expect("small");
                acc * (*a + i) / (*a + *b + i)
            }),
            Self::Mixture { pos, neg_value, neg_prob } => {
                (T::one() - *neg_prob) * pos.moment(k) + *neg_prob * neg_value.powi(k as i32)
            }
        }
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn variance(&self) -> T {
        let m = self.moment(1);
        self.moment(2) - m * m
    }

    /// Point mass carried by the law, as `(location, probability)`, for the
    /// families where it is a single atom: Degenerate and the negative atom
    /// of Mixture.
    pub fn atom(&self) -> Option<(T, T)> {
        match self {
            Self::Degenerate { j } => Some((*j, T::one())),
            Self::Mixture { neg_value, neg_prob, .. } => Some((*neg_value, *neg_prob)),
            _ => None,
        }
    }

    /// Density for continuous families, probability mass for discrete ones.
    /// For Mixture, the positive part's density or mass scaled by 1 − f.
    pub fn pdf_or_pmf(&self, x: T) -> Result<T> {
        match self {
            Self::Degenerate { j } => Ok(if x == *j { T::one() } else { T::zero() }),
            Self::Bernoulli { p } => Ok(if x == T::one() {
                *p
            } else if x == T::zero() {
                T::one() - *p
            } else {
                T::zero()
            }),
            Self::Poisson { lam_tilde } => {
                if x < T::zero() || x != x.floor() {
                    return Ok(T::zero());
                }
                Ok((x * lam_tilde.ln() - *lam_tilde - ln_gamma(x + T::one())).exp())
            }
            Self::Beta { .. } => {
                if !(x > T::zero() && x < T::one()) {
                    return Err(domain(format!("beta density needs x in (0,1), got {x}")));
                }
                Ok(self.ln_pdf(x)?.exp())
            }
            Self::Mixture { pos, neg_prob, .. } => Ok((T::one() - *neg_prob) * pos.pdf_or_pmf(x)?),
            _ => {
                if x < T::zero() {
                    return Ok(T::zero());
                }
                Ok(self.ln_pdf(x)?.exp())
            }
        }
    }

    /// Log-density of a continuous family on the interior of its support.
    pub fn ln_pdf(&self, x: T) -> Result<T> {
        let half = T::lit(0.5);
        match self {
            Self::Exponential { theta } => Ok(-theta.ln() - x / *theta),
            Self::Gamma { shape, rate } => {
                Ok(*shape * rate.ln() + (*shape - T::one()) * x.ln() - *rate * x - ln_gamma(*shape))
            }
            Self::ChiSquare { k } => Self::Gamma { shape: *k * half, rate: half }.ln_pdf(x),
            Self::InverseGaussian { mean, shape } => {
                let d = x - *mean;
                Ok(half * (*shape / (T::TAU() * x * x * x)).ln() - *shape * d * d / (T::lit(2.0) * *mean * *mean * x))
            }
            Self::Beta { shape_a: a, shape_b: b } => {
                let ln_b = ln_gamma(*a) + ln_gamma(*b) - ln_gamma(*a + *b);
                Ok((*a - T::one()) * x.ln() + (*b - T::one()) * (-x).ln_1p() - ln_b)
            }
            Self::Mixture { pos, neg_prob, .. } => Ok((-*neg_prob).ln_1p() + pos.ln_pdf(x)?),
            _ => Err(Error::Unsupported(format!("{} has no Lebesgue density", self.tag()))),
        }
    }

    /// φ(w) − 1 where φ is the characteristic function E[e^{iwJ}].
    ///
    /// Closed forms for every family; Beta uses Kummer's series for
    /// |w| ≤ 20 and quadrature against the density beyond.
    pub fn char_fn_minus_one(&self, w: T) -> Result<Complex<T>> {
        let i = Complex::new(T::zero(), T::one());
        let one = Complex::new(T::one(), T::zero());
        Ok(match self {
            Self::Degenerate { j } => cexpm1(i * (w * *j)),
            Self::Bernoulli { p } => cexpm1(i * w) * *p,
            Self::Poisson { lam_tilde } => cexpm1(cexpm1(i * w) * *lam_tilde),
            Self::Exponential { theta } => {
                let z = i * (w * *theta);
                z / (one - z)
            }
            Self::Gamma { shape, rate } => cexpm1((one - i * (w / *rate)).ln() * (-*shape)),
            Self::ChiSquare { k } => {
                Self::Gamma { shape: *k * T::lit(0.5), rate: T::lit(0.5) }.char_fn_minus_one(w)?
            }
            Self::InverseGaussian { mean, shape } => {
                // (λ/μ)(1 − √(1 − 2iμ²w/λ)) written as (λ/μ)ζ/(1 + √(1−ζ))
                let zeta = i * (T::lit(2.0) * *mean * *mean * w / *shape);
                let root = (one - zeta).sqrt();
                cexpm1(zeta / (one + root) * (*shape / *mean))
            }
            Self::Beta { shape_a, shape_b } => beta_cf_minus_one(*shape_a, *shape_b, w)?,
            Self::Mixture { pos, neg_value, neg_prob } => {
                pos.char_fn_minus_one(w)? * (T::one() - *neg_prob) + cexpm1(i * (w * *neg_value)) * *neg_prob
            }
        })
    }
}

fn beta_cf_minus_one<T: Real>(a: T, b: T, w: T) -> Result<Complex<T>> {
    let i = Complex::new(T::zero(), T::one());
    if w.abs() <= T::lit(20.0) {
        // ₁F₁(a; a+b; iw) − 1 = Σ_{n≥1} (a)_n (iw)^n / ((a+b)_n n!)
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = Complex::new(T::zero(), T::zero());
        for n in 0..400usize {
            let nf = T::from_usize_lossy(n);
            term = term * i * (w * (a + nf) / ((a + b + nf) * (nf + T::one())));
            sum = sum + term;
            if term.norm() <= T::epsilon() * sum.norm() {
                break;
            }
        }
        return Ok(sum);
    }
    let fam = JumpFamily::Beta { shape_a: a, shape_b: b };
    let q = quad::integrate(
        |x: T| {
            if x <= T::zero() || x >= T::one() {
                return Complex::new(T::zero(), T::zero());
            }
            let dens = fam.ln_pdf(x).map(|v| v.exp()).unwrap_or(T::zero());
            cexpm1(i * (w * x)) * dens
        },
        T::zero(),
        T::one(),
        T::lit(1e-12),
        T::lit(1e-10),
    )?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(JumpFamily::bernoulli(1.5_f64).is_err());
        assert!(JumpFamily::gamma(0.0_f64, 1.0).is_err());
        assert!(JumpFamily::inverse_gaussian(1.0_f64, -1.0).is_err());
        let pos = JumpFamily::gamma(1.0_f64, 1.0).unwrap();
        assert!(JumpFamily::mixture(pos.clone(), 0.5, 0.1).is_err());
        assert!(JumpFamily::mixture(pos, -0.5, 0.1).is_ok());
    }

    #[test]
    fn closed_form_moments() {
        let b = JumpFamily::bernoulli(0.001_f64).unwrap();
        for k in 1..=4 {
            assert_eq!(b.moment(k), 0.001);
        }
        let g = JumpFamily::gamma(0.7_f64, 2.5).unwrap();
        assert!((g.moment(2) - 0.7 * 1.7 / 6.25).abs() < 1e-15);
        let ig = JumpFamily::inverse_gaussian(0.4_f64, 1.3).unwrap();
        assert!((ig.moment(2) - (0.16 + 0.064 / 1.3)).abs() < 1e-15);
        let e = JumpFamily::exponential(0.5_f64).unwrap();
        assert!((e.moment(4) - 24.0 * 0.0625).abs() < 1e-15);
        let c = JumpFamily::chi_square(3.0_f64).unwrap();
        assert!((c.mean() - 3.0).abs() < 1e-15);
        assert!((c.variance() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn mixture_identity() {
        let pos = JumpFamily::gamma(0.3_f64, 4.0).unwrap();
        let mix = JumpFamily::mixture(pos.clone(), -0.2, 0.05).unwrap();
        for k in 1..=4 {
            let expect = 0.95 * pos.moment(k) + 0.05 * (-0.2_f64).powi(k as i32);
            assert_eq!(mix.moment(k), expect);
        }
        assert_eq!(mix.atom(), Some((-0.2, 0.05)));
    }

    #[test]
    fn densities() {
        let e = JumpFamily::exponential(2.0_f64).unwrap();
        assert!((e.pdf_or_pmf(0.0).unwrap() - 0.5).abs() < 1e-15);
        let g = JumpFamily::gamma(1.0_f64, 0.5).unwrap();
        for &x in &[0.1, 1.0, 3.7] {
            assert!((g.pdf_or_pmf(x).unwrap() - e.pdf_or_pmf(x).unwrap()).abs() < 1e-14);
        }
        let p = JumpFamily::poisson(0.5_f64).unwrap();
        assert!((p.pdf_or_pmf(1.0).unwrap() - 0.5 * (-0.5_f64).exp()).abs() < 1e-15);
        let total: f64 = (0..40).map(|k| p.pdf_or_pmf(k as f64).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let beta = JumpFamily::beta(2.0_f64, 3.0).unwrap();
        assert!(beta.pdf_or_pmf(1.2).is_err());
        assert!((beta.pdf_or_pmf(0.5).unwrap() - 12.0 * 0.5 * 0.25).abs() < 1e-13);
    }

    #[test]
    fn char_fn_small_argument_matches_mean() {
        let fams = [
            JumpFamily::gamma(0.3_f64, 2.0).unwrap(),
            JumpFamily::inverse_gaussian(0.5, 0.2).unwrap(),
            JumpFamily::beta(0.4, 2.0).unwrap(),
            JumpFamily::poisson(0.7).unwrap(),
            JumpFamily::exponential(0.9).unwrap(),
        ];
        let w = 1e-6;
        for f in &fams {
            let c = f.char_fn_minus_one(w).unwrap();
            assert!((c.im / w - f.mean()).abs() < 1e-6, "{f:?}");
            assert!((-c.re * 2.0 / (w * w) - f.moment(2)).abs() < 1e-3 * f.moment(2), "{f:?}");
        }
    }

    #[test]
    fn beta_series_and_quadrature_branches_agree() {
        let b = JumpFamily::beta(0.6_f64, 1.7).unwrap();
        let s = beta_cf_minus_one(0.6, 1.7, 19.99).unwrap();
        let direct = quad::integrate(
            |x: f64| cexpm1(Complex::new(0.0, 19.99 * x)) * b.ln_pdf(x).unwrap().exp(),
            0.0,
            1.0,
            1e-13,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((s - direct).norm() < 1e-8);
    }

    #[test]
    fn json_shape() {
        let f = JumpFamily::gamma(0.5_f64, 2.0).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"gamma","shape":0.5,"rate":2.0}"#);
        let back: JumpFamily<f64> = serde_json::from_str(r#"{"family":"ig","mean":1.0,"shape":2.0}"#).unwrap();
        assert_eq!(back, JumpFamily::InverseGaussian { mean: 1.0, shape: 2.0 });
    }
}

//! Analytic results checked against test-local quadrature, brute-force sums
//! and Monte Carlo.

use num_complex::Complex64;
use shotnoise_core::distributions::JumpFamily;
use shotnoise_core::levyou::{GaussianOUParams, LevyOUParams, SubordinatorSpec};
use shotnoise_core::limits::{self, FamilySequence, Limit};
use shotnoise_core::montecarlo::{
    estimate_density, ks_two_sample, run_ensemble, sample_moments, Binning, ProcessSpec,
};
use shotnoise_core::shotnoise::{shot_char_fn, shot_moments, ShotNoiseParams};
use shotnoise_core::specfun::ln_gamma;

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

fn simpson_c<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let re = simpson(|x| f(x).re, a, b, n);
    let im = simpson(|x| f(x).im, a, b, n);
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Tails below are integrated after y = x·e^s, which turns x⁻¹-type
// singularities into smooth, fast-decaying integrands.

fn gp_tail_oracle(shape: f64, rate: f64, x: f64) -> f64 {
    let top = (60.0 / (rate * x)).ln().max(1.0);
    simpson(|s| shape * (-rate * x * s.exp()).exp(), 0.0, top, 100_000)
}

fn igp_tail_oracle(sv: f64, b: f64, x: f64) -> f64 {
    let f = |s: f64| {
        let y = x * s.exp();
        sv * (-b * b * y / 2.0).exp() / (2.0 * std::f64::consts::PI * y).sqrt()
    };
    simpson(f, 0.0, 40.0, 200_000)
}

fn bp_tail_oracle(mu: f64, beta: f64, x: f64) -> f64 {
    // 1 − y = (1 − x)e^{−r}
    let f = |r: f64| {
        let one_minus = (1.0 - x) * (-r).exp();
        mu * beta * one_minus.powf(beta) / (1.0 - one_minus)
    };
    // the integrand varies on the scale x near r = 0
    simpson(f, 0.0, 2.0, 400_000) + simpson(f, 2.0, 60.0 / beta.min(1.0), 400_000)
}

#[test]
fn levy_tails_match_quadrature() {
    let xs = [0.01, 0.1, 1.0, 5.0];
    for (shape, rate) in [(1.0 / 3.0, 1.0 / 3.0), (1.0, 1.0), (33.3, 3.33)] {
        let gp = SubordinatorSpec::GammaProc { shape, rate };
        for x in xs {
            let u = gp.levy_tail(x).unwrap();
            let o = gp_tail_oracle(shape, rate, x);
            assert!(rel(u, o) < 1e-9, "GP({shape},{rate}) x={x}: {u} vs {o}");
        }
    }
    for (sv, b) in [((1.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()), (2.0, 0.5), (5.0, 3.0)] {
        let igp = SubordinatorSpec::IGProc { s: sv, b };
        for x in xs {
            let u = igp.levy_tail(x).unwrap();
            let o = igp_tail_oracle(sv, b, x);
            assert!(rel(u, o) < 1e-9, "IGP({sv},{b}) x={x}: {u} vs {o}");
        }
    }
    for (mu, beta) in [(1.0, 1.0 / 3.0), (2.0, 0.7), (1.0, 1.0), (1.0, 4.5)] {
        let bp = SubordinatorSpec::BetaProc { mu, beta };
        for x in [0.01, 0.1, 0.5, 0.9] {
            let u = bp.levy_tail(x).unwrap();
            let o = bp_tail_oracle(mu, beta, x);
            assert!(rel(u, o) < 1e-8, "BP({mu},{beta}) x={x}: {u} vs {o}");
        }
    }
}

#[test]
fn gamma_process_tail_reference_value() {
    // U(1) = E₁(1) for unit shape and rate
    let gp = SubordinatorSpec::GammaProc { shape: 1.0f64, rate: 1.0 };
    assert!((gp.levy_tail(1.0).unwrap() - 0.219_383_934_395_520_27).abs() < 1e-14);
}

fn gamma_pdf(shape: f64, rate: f64, x: f64) -> f64 {
    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
}

fn ig_pdf(mean: f64, shape: f64, x: f64) -> f64 {
    (shape / (2.0 * std::f64::consts::PI * x.powi(3))).sqrt() * (-shape * (x - mean).powi(2) / (2.0 * mean * mean * x)).exp()
}

fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)).exp()
}

#[test]
fn jump_moments_match_integrated_densities() {
    let cases: Vec<(JumpFamily<f64>, Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
        (JumpFamily::gamma(2.5, 1.5).unwrap(), Box::new(|x| gamma_pdf(2.5, 1.5, x)), 0.0, 60.0),
        (JumpFamily::inverse_gaussian(0.7, 1.3).unwrap(), Box::new(|x| ig_pdf(0.7, 1.3, x)), 1e-12, 80.0),
        (JumpFamily::beta(2.0, 3.5).unwrap(), Box::new(|x| beta_pdf(2.0, 3.5, x)), 0.0, 1.0),
        (JumpFamily::exponential(0.4).unwrap(), Box::new(|x: f64| (-x / 0.4).exp() / 0.4), 0.0, 40.0),
        (JumpFamily::chi_square(5.0).unwrap(), Box::new(|x| gamma_pdf(2.5, 0.5, x)), 0.0, 150.0),
    ];
    for (fam, pdf, a, b) in &cases {
        let mass = simpson(|x| pdf(x), *a, *b, 200_000);
        assert!((mass - 1.0).abs() < 1e-8, "{fam:?} mass {mass}");
        let crate_mass = simpson(|x| fam.pdf_or_pmf(x).unwrap_or(0.0), *a, *b, 200_000);
        assert!((crate_mass - 1.0).abs() < 1e-8, "{fam:?} crate pdf mass {crate_mass}");
        for k in 1..=4u32 {
            let m = simpson(|x| x.powi(k as i32) * pdf(x), *a, *b, 200_000);
            assert!(rel(fam.moment(k), m) < 1e-8, "{fam:?} k={k}: {} vs {m}", fam.moment(k));
        }
    }
}

#[test]
fn discrete_jump_moments_match_sums() {
    let lam = 0.37f64;
    let pois = JumpFamily::poisson(lam).unwrap();
    for k in 1..=4 {
        let mut p = (-lam).exp();
        let mut sum = 0.0;
        for j in 0..60 {
            sum += p * (j as f64).powi(k);
            p *= lam / (j + 1) as f64;
        }
        assert!(rel(pois.moment(k as u32), sum) < 1e-13, "k={k}");
    }
    let bern = JumpFamily::<f64>::bernoulli(0.2).unwrap();
    for k in 1..=4 {
        assert!((bern.moment(k) - 0.2).abs() < 1e-15);
    }
}

#[test]
fn shot_char_fn_matches_direct_integration() {
    let (lambda, alpha, x0, t) = (40.0, 1.3, 0.5, 1.7);
    // Bernoulli: φ_J(w) − 1 = p(e^{iw} − 1); gamma: (1 − iw/β)^{−a} − 1.
    let fams: Vec<(JumpFamily<f64>, Box<dyn Fn(f64) -> Complex64>)> = vec![
        (JumpFamily::bernoulli(0.3).unwrap(), Box::new(|w| 0.3 * (Complex64::i() * w).exp() - 0.3)),
        (
            JumpFamily::gamma(0.8, 2.0).unwrap(),
            Box::new(|w| (Complex64::new(1.0, -w / 2.0)).powf(-0.8) - 1.0),
        ),
    ];
    for (fam, phi_m1) in &fams {
        let p = ShotNoiseParams::new(lambda, alpha, x0, fam.clone()).unwrap();
        for u in [-10.0, -2.5, 0.3, 1.0, 7.0] {
            let integral = simpson_c(|s| phi_m1(u * (-alpha * s).exp()), 0.0, t, 20_000);
            let want = (lambda * integral + Complex64::i() * u * x0 * (-alpha * t).exp()).exp();
            let got = shot_char_fn(&p, t, u).unwrap();
            assert!((got - want).norm() < 1e-10, "{fam:?} u={u}: {got} vs {want}");
        }
    }
}

#[test]
fn shot_moments_match_char_fn_derivatives() {
    let p = ShotNoiseParams::new(25.0, 0.8, 0.2, JumpFamily::inverse_gaussian(0.1, 0.05).unwrap()).unwrap();
    let t = 2.0;
    let h = 1e-3;
    let phi = |u: f64| shot_char_fn(&p, t, u).unwrap();
    // central differences of ln φ give the first two cumulants
    let lp = |u: f64| phi(u).ln();
    let k1 = ((lp(h) - lp(-h)) / (2.0 * h)).im;
    let k2 = -((lp(h) - 2.0 * lp(0.0) + lp(-h)) / (h * h)).re;
    let m = shot_moments(&p, t, 0.0);
    assert!(rel(m.mean, k1) < 1e-6, "{} vs {k1}", m.mean);
    assert!(rel(m.variance, k2) < 1e-4, "{} vs {k2}", m.variance);
}

#[test]
fn limit_subordinators_carry_limiting_moments() {
    for mu in [0.5, 1.0, 3.0] {
        for s2 in [0.5, 3.0] {
            for seq in limits::nonnegative_registry(mu, s2).unwrap() {
                let lim = limits::limiting_moments(&seq);
                let Ok(sub) = limits::limit_levy_density(&seq) else { continue };
                let (Limit::Finite(m), Limit::Finite(v)) = (lim.mu, lim.sigma2) else { unreachable!() };
                assert!(rel(sub.increment_mean(), m) < 1e-13, "{}", seq.kind());
                assert!(rel(sub.increment_msq(), v) < 1e-13, "{}", seq.kind());
            }
        }
    }
}

#[test]
fn gaussian_ou_char_fn_is_bounded_and_nonneg_prob_matches_ensemble() {
    let g = GaussianOUParams::new(1.0, 3.0, 1.0, 0.0).unwrap();
    for t in [0.1, 1.0, 10.0] {
        for u in [-10.0, -1.0, 0.5, 4.0] {
            assert!(g.char_fn(t, u).norm() <= 1.0 + 1e-15);
        }
    }
    let t = 1.0;
    let n = 100_000;
    let ys = run_ensemble(&ProcessSpec::GaussianOu(g.clone()), t, n, 5, 0).unwrap().samples;
    let frac = ys.iter().filter(|&&y| y >= 0.0).count() as f64 / n as f64;
    let p = g.nonneg_prob(t);
    assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{frac} vs {p}");
}

#[test]
fn bernoulli_stationary_variance() {
    let lambda = 1000.0;
    let p = ShotNoiseParams::new(lambda, 1.0, 0.0, JumpFamily::bernoulli(1.0 / lambda).unwrap()).unwrap();
    let xs = run_ensemble(&ProcessSpec::Shot(p), 40.0, 40_000, 9, 0).unwrap().samples;
    let m = sample_moments(&xs);
    assert!((m.mean - 1.0).abs() < 4.0 * m.mean_se, "{m:?}");
    assert!((m.variance - 0.5).abs() < 4.0 * m.variance_se, "{m:?}");
}

#[test]
fn uniform_histogram_is_flat() {
    let n = 200_000;
    // van der Corput points: deterministic and equidistributed
    let xs: Vec<f64> = (1..=n as u64)
        .map(|mut i| {
            let (mut x, mut f) = (0.0, 0.5);
            while i > 0 {
                x += f * (i & 1) as f64;
                i >>= 1;
                f *= 0.5;
            }
            x
        })
        .collect();
    let d = estimate_density(&xs, Binning::Fixed(20)).unwrap();
    let mass: f64 = d.density.iter().zip(d.bin_edges.windows(2)).map(|(p, e)| p * (e[1] - e[0])).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    for v in &d.density {
        assert!((v - 1.0).abs() < 0.01, "{v}");
    }
}

#[test]
fn ks_separates_laws() {
    let sub = SubordinatorSpec::GammaProc { shape: 3.0, rate: 1.0 };
    let p = LevyOUParams::new(1.0, 0.0, sub).unwrap();
    let a = run_ensemble(&ProcessSpec::LevyOu(p.clone()), 1.0, 20_000, 1, 0).unwrap().samples;
    let b = run_ensemble(&ProcessSpec::LevyOu(p.clone()), 1.0, 20_000, 2, 0).unwrap().samples;
    let c = run_ensemble(&ProcessSpec::LevyOu(p), 1.1, 20_000, 3, 0).unwrap().samples;
    assert!(!ks_two_sample(&a, &b, 0.01).unwrap().reject);
    assert!(ks_two_sample(&a, &c, 0.01).unwrap().reject);
}

#[test]
fn ensembles_do_not_depend_on_worker_count() {
    let specs = [
        ProcessSpec::Shot(ShotNoiseParams::new(500.0, 1.0, 0.3, JumpFamily::gamma(0.002, 2.0).unwrap()).unwrap()),
        ProcessSpec::LevyOu(LevyOUParams::new(1.0, 0.0, SubordinatorSpec::IGProc { s: 1.0, b: 0.6 }).unwrap()),
        ProcessSpec::GaussianOu(GaussianOUParams::new(1.0, 2.0, 1.0, 0.0).unwrap()),
    ];
    for spec in &specs {
        let a = run_ensemble(spec, 1.5, 2_000, 42, 1).unwrap().samples;
        let b = run_ensemble(spec, 1.5, 2_000, 42, 3).unwrap().samples;
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()), "{}", spec.tag());
    }
}

#[test]
fn degenerate_sequences_are_flagged() {
    for seq in [
        FamilySequence::Degenerate { scale: 1.0, scaling: limits::DegenerateScaling::Mean },
        FamilySequence::Degenerate { scale: 3.0, scaling: limits::DegenerateScaling::SecondMoment },
    ] {
        assert!(limits::limiting_moments(&seq).incompatible);
    }
}

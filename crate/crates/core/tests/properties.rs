use proptest::prelude::*;

use shotnoise_core::distributions::JumpFamily;
use shotnoise_core::levyou::{levyou_moments, LevyOUParams, SubordinatorSpec};
use shotnoise_core::limits::{self, Classification, FamilySequence};
use shotnoise_core::montecarlo::{iae, DensityInput, GridPolicy};
use shotnoise_core::real::fmt_f64;
use shotnoise_core::shotnoise::{shot_moments, ShotNoiseParams};

fn grid() -> Vec<f64> {
    vec![1e3, 1e4, 1e6, 1e8]
}

proptest! {
    // No nonnegative jump family yields a Gaussian diffusion limit.
    #[test]
    fn nonnegative_registry_is_never_gaussian(mu in 0.05f64..20.0, s2 in 0.05f64..20.0) {
        for seq in limits::nonnegative_registry(mu, s2).unwrap() {
            let report = limits::check_conditions(&seq, &grid()).unwrap();
            prop_assert_ne!(report.classification, Classification::GaussianDiffusion, "{}", seq.kind());
            prop_assert_eq!(report.classification, limits::classify(&seq, &limits::limiting_moments(&seq)));
        }
    }

    #[test]
    fn table_rows_converge_on_the_grid(mu in 0.1f64..10.0, s2 in 0.1f64..10.0) {
        for seq in [
            FamilySequence::Gamma { mu, sigma_tilde2: s2 },
            FamilySequence::InverseGaussian { mu, sigma_tilde2: s2 },
            FamilySequence::ChiSquare { mu },
            FamilySequence::Poisson { mu },
            FamilySequence::beta_tied(mu, s2).unwrap(),
        ] {
            let report = limits::check_conditions(&seq, &grid()).unwrap();
            for tr in &report.trends {
                let last = *tr.errors.last().unwrap();
                prop_assert!(last < 1e-4, "{} k={} err {}", seq.kind(), tr.order, last);
            }
        }
    }

    #[test]
    fn iae_is_symmetric_and_bounded(
        a in prop::collection::vec(-5.0f64..5.0, 20..200),
        b in prop::collection::vec(-3.0f64..8.0, 20..200),
        bins in 2usize..64,
    ) {
        let policy = GridPolicy::PooledQuantiles { bins, lower: 0.001, upper: 0.999 };
        let (da, db) = (DensityInput::Samples(&a), DensityInput::Samples(&b));
        let ab = iae(&da, &db, &policy).unwrap();
        let ba = iae(&db, &da, &policy).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
        prop_assert!(iae(&da, &da, &policy).unwrap() < 1e-12);
    }

    #[test]
    fn number_text_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn shot_variance_grows_and_covariance_decays(
        lambda in 1.0f64..1e4, alpha in 0.1f64..5.0, shape in 0.01f64..5.0, rate in 0.1f64..10.0,
        t in 0.01f64..20.0, dt in 0.01f64..5.0, s in 0.0f64..5.0,
    ) {
        let p = ShotNoiseParams::new(lambda, alpha, 0.0, JumpFamily::gamma(shape, rate).unwrap()).unwrap();
        let m0 = shot_moments(&p, t, s);
        let m1 = shot_moments(&p, t + dt, s);
        prop_assert!(m1.variance >= m0.variance);
        prop_assert!(m0.covariance <= m0.variance * (1.0 + 1e-12));
        // Jensen: E[X⁴] ≥ (E[X²])²
        let m2 = m0.variance + m0.mean * m0.mean;
        prop_assert!(m0.fourth_moment >= m2 * m2 * (1.0 - 1e-12));
    }

    #[test]
    fn shot_moments_approach_levy_ou(mu in 0.2f64..5.0, s2 in 0.2f64..5.0, t in 0.1f64..10.0) {
        let seq = FamilySequence::Gamma { mu, sigma_tilde2: s2 };
        let sub = limits::limit_levy_density(&seq).unwrap();
        let lm = levyou_moments(&LevyOUParams::new(1.0, 0.0, sub).unwrap(), t, 0.0);
        let shot = ShotNoiseParams::new(1e6, 1.0, 0.0, limits::table1_family(&seq, 1e6).unwrap()).unwrap();
        let sm = shot_moments(&shot, t, 0.0);
        prop_assert!(((sm.mean - lm.mean) / lm.mean).abs() < 1e-9);
        // λE[J²] = σ̃²(1 + μ²/(σ̃²λ)) exactly for the gamma row
        let excess = mu * mu / (s2 * 1e6);
        prop_assert!((sm.variance / lm.variance - 1.0 - excess).abs() < 1e-9);
    }

    #[test]
    fn levy_tails_decrease(x in 0.001f64..0.99, dx in 1e-3f64..0.5, beta in 0.2f64..5.0) {
        let subs = [
            SubordinatorSpec::GammaProc { shape: 1.0, rate: beta },
            SubordinatorSpec::IGProc { s: 1.0, b: beta },
            SubordinatorSpec::BetaProc { mu: 1.0, beta },
        ];
        for sub in &subs {
            let y = match sub { SubordinatorSpec::BetaProc { .. } => (x + dx).min(0.999), _ => x + dx };
            if y <= x { continue; }
            let (ux, uy) = (sub.levy_tail(x).unwrap(), sub.levy_tail(y).unwrap());
            prop_assert!(uy < ux, "{sub:?} U({x})={ux} U({y})={uy}");
        }
    }

    #[test]
    fn jump_laws_round_trip_through_json(shape in 1e-6f64..10.0, rate in 1e-3f64..10.0) {
        for fam in [
            JumpFamily::gamma(shape, rate).unwrap(),
            JumpFamily::inverse_gaussian(shape, rate).unwrap(),
            JumpFamily::mixture(JumpFamily::beta(shape, rate).unwrap(), -rate, 0.1).unwrap(),
        ] {
            let text = serde_json::to_string(&fam).unwrap();
            let back: JumpFamily<f64> = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, fam);
        }
    }
}

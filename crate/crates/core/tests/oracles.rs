//! Closed-form and hand-computed values, checked through the public API.

use multipolar::criticality::{
    criticality_verdict, eval_cutoff, Criticality, CutoffFamily, CutoffQuantity, VerdictParams,
};
use multipolar::exponents::{
    attainability_verdict, classify_seven_families, family_exponents, is_integrable, singular_profile, Family,
};
use multipolar::lab::{random_points, sharpness_probe, supersolution_check, SharpnessSweep};
use multipolar::multipole::{
    bilaplacian_phi_s, eval_power_product, laplacian_phi_s, sharp_constant, ExponentTables, PoleConfig, PotentialKind,
    PotentialSpec, PowerProduct,
};
use multipolar::quadrature::{
    annulus_integrate, build_sampler, mc_integrate, radial_reference_integral, sphere_area, McParams, SamplerHints,
};
use multipolar::{Error, Rational};

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

fn e(k: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; 5];
    v[k] = scale;
    v
}

/// Poles at 0 and e₁ in R⁵.
fn unit_pair() -> PoleConfig {
    PoleConfig::new(5, vec![vec![0.0; 5], e(0, 1.0)], None).unwrap()
}

fn simplex(n: usize) -> PoleConfig {
    PoleConfig::new(5, multipolar::multipole::regular_simplex(n, 5).unwrap(), None).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn dimension_four_is_refused() {
    let r = PoleConfig::new(4, vec![vec![0.0; 4]], None);
    assert!(matches!(
        r,
        Err(Error::DimensionTooSmall {
            dimension: 4,
            required: 5
        })
    ));
}

#[test]
fn ground_state_value_at_the_midpoint() {
    let cfg = unit_pair();
    let pp = PowerProduct::new(&cfg, vec![-0.5, -0.5]).unwrap();
    assert!(close(eval_power_product(&pp, &e(0, 0.5)).unwrap(), 2.0, 1e-14));
}

#[test]
fn radial_laplacian_and_bilaplacian() {
    let one = PoleConfig::new(5, vec![vec![0.0; 5]], None).unwrap();
    assert!(close(laplacian_phi_s(&one, int(1), &e(2, 1.0)).unwrap(), 4.0, 1e-14));
    assert!(close(
        bilaplacian_phi_s(&one, int(-2), &e(2, 1.0)).unwrap(),
        -8.0,
        1e-13
    ));
}

#[test]
fn exponent_tables_by_hand() {
    let t = ExponentTables::new(&simplex(2), int(-1)).unwrap();
    assert_eq!(t.xi(0, 0), r(5, 6));
    assert_eq!(t.xi(1, 0), r(1, 6));
    let t = ExponentTables::new(&simplex(3), int(-1)).unwrap();
    assert_eq!(t.zeta(0, 0, 1), r(7, 15));
    assert_eq!(t.zeta(2, 0, 1), r(1, 15));
}

#[test]
fn potentials_by_hand() {
    let cfg = unit_pair();
    let vn = PotentialSpec::new(PotentialKind::Vn, &cfg).unwrap();
    assert!(close(vn.eval(&e(0, 2.0)).unwrap(), 1.0 / 16.0, 1e-14));
    let w2 = PotentialSpec::new(PotentialKind::W2, &cfg).unwrap();
    assert!(close(w2.eval(&e(0, 0.5)).unwrap(), 16.0, 1e-14));
}

#[test]
fn sharp_constant_values() {
    assert_eq!(sharp_constant(5, 2, 2).unwrap(), r(25, 16));
    assert_eq!(sharp_constant(6, 3, 2).unwrap(), r(16, 9));
    assert_eq!(sharp_constant(5, 2, 1).unwrap(), r(9, 4));
    assert_eq!(sharp_constant(5, 3, 2).unwrap(), r(25, 81));
}

#[test]
fn single_pole_family_exponents() {
    let ex = family_exponents(5, 2, Family::A, &[0]).unwrap();
    let p = singular_profile(&ex);
    assert_eq!(p.local_exponents[0], int(-5));
    assert_eq!(p.infinity_exponent, int(-6));
    let v = is_integrable(&p, 5);
    assert!(!v.integrable);

    let ex = family_exponents(5, 3, Family::A, &[0]).unwrap();
    let p = singular_profile(&ex);
    assert_eq!(p.local_exponents[0], r(-14, 3));
    assert!(is_integrable(&p, 5).integrable);
}

#[test]
fn classification_tables() {
    let two = classify_seven_families(5, 2).unwrap();
    assert_eq!(two.non_integrable(), vec![Family::A, Family::C, Family::E, Family::G]);
    assert!(two.get(Family::B).is_integrable());
    assert!(!two.get(Family::D).is_applicable());
    assert!(!two.get(Family::F).is_applicable());
    assert!(classify_seven_families(5, 3).unwrap().all_applicable_integrable());
    assert!(classify_seven_families(6, 4).unwrap().all_applicable_integrable());
}

#[test]
fn attainability_witnesses() {
    let a = attainability_verdict(5, 3).unwrap();
    assert!(a.attained);
    assert_eq!(a.witness, vec![r(-1, 3); 3]);
    assert!(!attainability_verdict(5, 2).unwrap().attained);
    assert!(attainability_verdict(9, 3).unwrap().attained);
}

#[test]
fn sampler_construction_rule() {
    let cfg = simplex(3);
    let ex = family_exponents(5, 3, Family::A, &[0]).unwrap();
    let s = build_sampler(&cfg, &singular_profile(&ex), &SamplerHints::default()).unwrap();
    let betas: Vec<f64> = s
        .components()
        .iter()
        .filter_map(|c| match c.law {
            multipolar::quadrature::RadialLaw::PowerBall { beta, .. } => Some(beta),
            _ => None,
        })
        .collect();
    assert!(betas.iter().any(|b| (b - 1.0 / 6.0).abs() < 1e-12), "{betas:?}");

    let two = simplex(2);
    let ex = family_exponents(5, 2, Family::A, &[0]).unwrap();
    let r = build_sampler(&two, &singular_profile(&ex), &SamplerHints::default());
    assert!(matches!(r, Err(Error::NonIntegrableTarget(_))));
}

#[test]
fn radial_reference_values() {
    let pi2 = std::f64::consts::PI.powi(2);
    assert!(close(
        radial_reference_integral(5, 2.0, 1.0).unwrap(),
        8.0 * pi2 / 9.0,
        1e-13
    ));
    assert!(close(
        radial_reference_integral(5, 0.0, 1.0).unwrap(),
        8.0 * pi2 / 15.0,
        1e-13
    ));
    assert!(close(sphere_area(5), 8.0 * pi2 / 3.0, 1e-13));
}

#[test]
fn inverse_square_over_the_unit_ball() {
    let one = PoleConfig::new(5, vec![vec![0.0; 5]], None).unwrap();
    let profile = multipolar::exponents::SingularProfile {
        local_exponents: vec![int(-2)],
        infinity_exponent: int(0),
    };
    let sampler = build_sampler(&one, &profile, &SamplerHints::compact(vec![0.0; 5], 1.0)).unwrap();
    let q = mc_integrate(
        |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 < 1.0 {
                1.0 / r2
            } else {
                0.0
            }
        },
        &sampler,
        200_000,
        7,
    )
    .unwrap();
    let exact = 8.0 * std::f64::consts::PI.powi(2) / 9.0;
    assert!(q.within(exact, 3.0), "{q:?} vs {exact}");
}

#[test]
fn annulus_oracles() {
    let eps: f64 = 0.1;
    let q = annulus_integrate(
        |x| x.iter().map(|v| v * v).sum::<f64>().powf(-2.5),
        &[0.0; 5],
        eps * eps,
        eps,
        100_000,
        3,
    )
    .unwrap();
    // The log-uniform annulus sampler is exact for |x|^{-N}: zero variance.
    assert!(close(q.estimate, sphere_area(5) * (1.0 / eps).ln(), 1e-12), "{q:?}");
    let q = annulus_integrate(|_| 1.0, &[0.0; 5], 1.0, 2.0, 100_000, 3).unwrap();
    assert!(q.within(sphere_area(5) * 31.0 / 5.0, 3.0), "{q:?}");
}

#[test]
fn cutoff_printed_values() {
    let cfg = simplex(2);
    let eps: f64 = 0.1;
    let fam = CutoffFamily::new(&cfg, eps).unwrap();
    let a = cfg.pole(0);
    let at = |d: f64| {
        let mut x = a.to_vec();
        x[2] += d;
        x
    };
    assert!((eval_cutoff(&fam, &at(eps), CutoffQuantity::Value) - 1.0).abs() < 1e-12);
    assert!((eval_cutoff(&fam, &at(eps.powf(1.5)), CutoffQuantity::Value) - 0.5).abs() < 1e-12);
    let core = at(0.5 * eps * eps);
    for what in [
        CutoffQuantity::Value,
        CutoffQuantity::GradientNorm,
        CutoffQuantity::Laplacian,
    ] {
        assert_eq!(eval_cutoff(&fam, &core, what), 0.0);
    }
    assert!(CutoffFamily::new(&cfg, 0.25).is_err());
}

#[test]
fn supersolution_examples() {
    let three = simplex(3);
    let pts = random_points(&three, 1000, 0.05, 5);
    let rep = supersolution_check(&three, int(-1), &pts).unwrap();
    assert!(rep.pass() && rep.max_relative_defect.unwrap() < 1e-10, "{rep:?}");
    let two = simplex(2);
    let pts = random_points(&two, 1000, 0.05, 6);
    assert!(supersolution_check(&two, int(-2), &pts).unwrap().laplacian_sign_holds);
    assert!(supersolution_check(&two, int(1), &pts).is_err());
}

#[test]
fn coarse_mollified_sweep_decreases() {
    let sweep = SharpnessSweep::Mollified {
        s: int(-1),
        points: vec![(0.2, 5.0), (0.1, 10.0), (0.05, 20.0)],
    };
    let probe = sharpness_probe(&simplex(3), &sweep, &McParams::new(200_000, 1)).unwrap();
    assert!(probe.monotone, "{probe:?}");
    assert!(probe.lower_bound_holds);
    let q: Vec<f64> = probe.points.iter().map(|p| p.quotient.quotient).collect();
    assert!(q[2] < q[0], "{q:?}");
}

#[test]
fn cutoff_sweep_decreases_toward_the_two_pole_constant() {
    let sweep = SharpnessSweep::Cutoff {
        epsilons: vec![0.1, 0.05, 0.02],
    };
    let probe = sharpness_probe(&simplex(2), &sweep, &McParams::new(200_000, 1)).unwrap();
    assert_eq!(probe.sharp_constant, r(25, 16));
    assert!(probe.monotone, "{probe:?}");
    assert!(probe.lower_bound_holds, "{probe:?}");
    let q: Vec<f64> = probe.points.iter().map(|p| p.quotient.quotient).collect();
    assert!(q[2] < q[0], "{q:?}");
}

#[test]
fn verdict_examples() {
    let params = VerdictParams {
        samples: 50_000,
        seed: 42,
        ..VerdictParams::default()
    };
    let v = criticality_verdict(5, 3, &params).unwrap();
    assert_eq!(v.verdict, Criticality::PositiveCritical);
    assert!(v.evidence_supports_verdict, "{v:?}");
    let v = criticality_verdict(5, 2, &params).unwrap();
    assert_eq!(v.verdict, Criticality::NullCritical);
    assert!(v.evidence_supports_verdict, "{v:?}");
    assert_eq!(
        criticality_verdict(6, 4, &params).unwrap().verdict,
        Criticality::PositiveCritical
    );
}

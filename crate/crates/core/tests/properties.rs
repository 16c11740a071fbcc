//! Property-based invariants across modules.

use proptest::prelude::*;

use multipolar::criticality::{rate_fit, CutoffFamily};
use multipolar::lab::{fd_derivative, rayleigh_quotient, DerivativeOrder, TrialFunction};
use multipolar::multipole::{
    rellich_coefficients, sharp_constant, xi_zeta_factor, ExponentTables, GroundState, PoleConfig, PotentialKind,
    PotentialSpec, RellichTerm,
};
use multipolar::quadrature::McParams;
use multipolar::{rational_to_f64, Rational};

const DIM: usize = 5;

fn point(range: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-range..range, DIM)
}

/// 2 or 3 poles, pairwise at least 0.5 apart.
fn poles() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(1.5), 2..=3).prop_filter("poles too close", |ps| {
        ps.iter().enumerate().all(|(i, a)| {
            ps[i + 1..]
                .iter()
                .all(|b| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() > 0.25)
        })
    })
}

fn s_value() -> impl Strategy<Value = Rational> {
    (-12i64..12, 1i64..4)
        .prop_map(|(p, q)| Rational::new(p, q))
        .prop_filter("s must avoid 0, 2 and 4", |s| {
            *s != Rational::from_integer(0) && *s != Rational::from_integer(2) && *s != Rational::from_integer(4)
        })
}

fn far_from(config: &PoleConfig, x: &[f64], d: f64) -> bool {
    config.nearest_pole(x).1 > d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn xi_columns_and_zeta_slices_sum_to_one(n in 2usize..6, s in s_value()) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(n, DIM).unwrap(), None).unwrap();
        let t = ExponentTables::new(&cfg, s).unwrap();
        prop_assert!(t.xi_column_sums().iter().all(|c| *c == Rational::from_integer(1)));
        prop_assert!(t.zeta_slice_sums().iter().all(|c| *c == Rational::from_integer(1)));
    }

    #[test]
    fn xi_zeta_proportionality(ps in poles(), s in s_value(), x in point(3.0)) {
        let cfg = PoleConfig::new(DIM, ps, None).unwrap();
        prop_assume!(far_from(&cfg, &x, 0.05));
        let t = ExponentTables::new(&cfg, s).unwrap();
        let g = cfg.geometry(&x).unwrap();
        let left = t.xi_double_sum(&cfg, &g);
        let right = rational_to_f64(&xi_zeta_factor(s).unwrap()) * t.zeta_single_sum(&cfg, &g);
        prop_assert!((left - right).abs() <= 1e-10 * left.abs().max(right.abs()).max(1e-30));
    }

    #[test]
    fn laplacian_matches_finite_differences(ps in poles(), s in s_value(), x in point(3.0)) {
        let cfg = PoleConfig::new(DIM, ps, None).unwrap();
        prop_assume!(far_from(&cfg, &x, 0.1));
        let gs = GroundState::new(&cfg, s);
        let lap = gs.laplacian(&x).unwrap();
        let phi = |y: &[f64]| gs.value(&cfg.geometry(y).unwrap());
        let fd = fd_derivative(phi, &x, DerivativeOrder::Laplacian, None, cfg.poles()).unwrap();
        // Relative to the natural size φ/d², which does not cancel.
        let d = cfg.nearest_pole(&x).1;
        let scale = phi(&x) / (d * d);
        prop_assert!((fd - lap).abs() <= 1e-6 * scale, "fd {} vs {}", fd, lap);
    }

    #[test]
    fn rellich_family_collapses_to_the_sharp_potential(n in 2usize..6, x in point(3.0)) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(n, DIM).unwrap(), None).unwrap();
        prop_assume!(far_from(&cfg, &x, 0.05));
        let s = Rational::from_integer(4 - DIM as i64);
        let [a, b, _] = rellich_coefficients(DIM, n, s);
        prop_assert_eq!(a, Rational::from_integer(0));
        prop_assert_eq!(b, Rational::from_integer(0));
        let total = PotentialSpec::new(PotentialKind::RellichFamily { s, term: RellichTerm::Total }, &cfg).unwrap();
        let vn = PotentialSpec::new(PotentialKind::Vn, &cfg).unwrap();
        let lambda = rational_to_f64(&sharp_constant(DIM, n, 2).unwrap());
        let (w, v) = (total.eval(&x).unwrap(), lambda * vn.eval(&x).unwrap());
        prop_assert!((w - v).abs() <= 1e-12 * v.abs(), "{} vs {}", w, v);
    }

    #[test]
    fn cutoff_stays_in_the_unit_interval(eps in 0.01f64..0.2, x in point(200.0)) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(2, DIM).unwrap(), None).unwrap();
        let fam = CutoffFamily::new(&cfg, eps).unwrap();
        let v = fam.value(&x);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn rate_fit_recovers_planted_coefficients(c1 in 0.1f64..100.0, c2 in -10.0f64..10.0) {
        let series: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.02, 0.01]
            .iter()
            .map(|&e: &f64| {
                let l = (1.0 / e).ln();
                (e, c1 / l + c2 * e * l * l)
            })
            .collect();
        let fit = rate_fit(DIM, &series).unwrap();
        prop_assert!((fit.c1 - c1).abs() <= 1e-8 * c1.abs().max(1.0));
        prop_assert!((fit.c2 - c2).abs() <= 1e-7 * c2.abs().max(1.0));
    }
}

fn quotient_for(config: &PoleConfig, center: Vec<f64>, radius: f64, amplitude: f64, seed: u64) -> f64 {
    let vn = PotentialSpec::new(PotentialKind::Vn, config).unwrap();
    let bump = TrialFunction::bump(config, center, radius).unwrap().scaled(amplitude);
    rayleigh_quotient(&bump, &vn, 2, &McParams::new(4_000, seed))
        .unwrap()
        .quotient
}

fn near_poles(config: &PoleConfig) -> impl Strategy<Value = (Vec<f64>, f64)> {
    let a = config.pole(0).to_vec();
    (point(0.3), 0.3f64..0.8).prop_map(move |(d, r)| (a.iter().zip(&d).map(|(p, q)| p + q).collect(), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quotient_is_invariant_under_power_of_two_scaling(k in -6i32..6, seed in 0u64..1000) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(2, DIM).unwrap(), None).unwrap();
        let c = cfg.pole(0).to_vec();
        let q1 = quotient_for(&cfg, c.clone(), 0.6, 1.0, seed);
        let q2 = quotient_for(&cfg, c, 0.6, 2f64.powi(k), seed);
        prop_assert_eq!(q1, q2);
    }

    #[test]
    fn quotient_is_invariant_under_any_scaling(amp in 0.01f64..100.0, seed in 0u64..1000) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(2, DIM).unwrap(), None).unwrap();
        let c = cfg.pole(1).to_vec();
        let q1 = quotient_for(&cfg, c.clone(), 0.7, 1.0, seed);
        let q2 = quotient_for(&cfg, c, 0.7, amp, seed);
        prop_assert!((q1 - q2).abs() <= 1e-13 * q1);
    }

    #[test]
    fn quotient_is_translation_equivariant(shift in point(2.0), seed in 0u64..1000) {
        let base = multipolar::multipole::regular_simplex(3, DIM).unwrap();
        let cfg = PoleConfig::new(DIM, base.clone(), None).unwrap();
        let moved = cfg.translated(&shift).unwrap();
        let center = cfg.pole(0).to_vec();
        let moved_center: Vec<f64> = center.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let q1 = quotient_for(&cfg, center, 0.6, 1.0, seed);
        let q2 = quotient_for(&moved, moved_center, 0.6, 1.0, seed);
        // Same random stream; only the rounding of the shifted coordinates differs.
        prop_assert!((q1 - q2).abs() <= 1e-6 * q1, "{} vs {}", q1, q2);
    }

    #[test]
    fn quotient_is_dilation_covariant(t in 0.25f64..4.0, seed in 0u64..1000) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(3, DIM).unwrap(), None).unwrap();
        let scaled = cfg.scaled(t).unwrap();
        let vn = PotentialSpec::new(PotentialKind::Vn, &cfg).unwrap();
        let vn_t = PotentialSpec::new(PotentialKind::Vn, &scaled).unwrap();
        let params = McParams::new(4_000, seed);
        let c = cfg.pole(1).to_vec();
        let u = TrialFunction::bump(&cfg, c.clone(), 0.7).unwrap();
        let u_t = TrialFunction::bump(&scaled, c.iter().map(|v| v * t).collect(), 0.7 * t).unwrap();
        let a = rayleigh_quotient(&u, &vn, 2, &params).unwrap();
        let b = rayleigh_quotient(&u_t, &vn_t, 2, &params).unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        prop_assert!((a.quotient - b.quotient).abs() <= 3.0 * se.max(1e-9 * a.quotient), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn no_bump_beats_the_sharp_constant((center, radius) in near_poles(
        &PoleConfig::new(DIM, multipolar::multipole::regular_simplex(3, DIM).unwrap(), None).unwrap()
    ), seed in 0u64..1000) {
        let cfg = PoleConfig::new(DIM, multipolar::multipole::regular_simplex(3, DIM).unwrap(), None).unwrap();
        let vn = PotentialSpec::new(PotentialKind::Vn, &cfg).unwrap();
        let bump = TrialFunction::bump(&cfg, center, radius).unwrap();
        let q = rayleigh_quotient(&bump, &vn, 2, &McParams::new(20_000, seed)).unwrap();
        let lambda = rational_to_f64(&sharp_constant(DIM, 3, 2).unwrap());
        prop_assert!(q.quotient >= lambda - 3.0 * q.std_error, "{:?}", q);
    }
}

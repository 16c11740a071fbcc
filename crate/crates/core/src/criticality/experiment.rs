//! The cut-off energy integrals, their decay fit, and the criticality verdict.

use serde::{Deserialize, Serialize};

use super::cutoff::CutoffFamily;
use crate::error::{Error, Result};
use crate::exponents::{attainability_verdict, Attainability, SingularProfile};
use crate::multipole::{regular_simplex, sharp_constant, GroundState, PoleConfig, PotentialKind, PotentialSpec};
use crate::quadrature::{
    annulus_integrate_paired, build_sampler, mc_integrate_paired, McParams, QuadResult, SamplerHints,
};
use crate::{rational_to_f64, Rational};

/// The three energy integrals of `φ_{4-N} v_ε`:
/// `I₁ = ∫|φΔv_ε|²`, `I₂ = ∫|∇φ·∇v_ε|²`, `I₃ = ∫|φΔφ||∇v_ε|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityIntegrals {
    pub epsilon: f64,
    pub i1: QuadResult,
    pub i2: QuadResult,
    pub i3: QuadResult,
    pub total: f64,
    /// Standard error of `total`, from the per-sample covariance within each
    /// annulus (annuli are independent).
    pub total_std_error: f64,
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I1_err")]
    pub i1_err: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "I2_err")]
    pub i2_err: f64,
    #[serde(rename = "I3")]
    pub i3: f64,
    #[serde(rename = "I3_err")]
    pub i3_err: f64,
    pub total: f64,
    pub total_err: f64,
}

impl CriticalityIntegrals {
    pub fn row(&self) -> SweepRow {
        SweepRow {
            epsilon: self.epsilon,
            i1: self.i1.estimate,
            i1_err: self.i1.std_error,
            i2: self.i2.estimate,
            i2_err: self.i2.std_error,
            i3: self.i3.estimate,
            i3_err: self.i3.std_error,
            total: self.total,
            total_err: self.total_std_error,
        }
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sweep point `epsilon`, depending only on the base seed and `ε`.
pub fn epsilon_seed(seed: u64, epsilon: f64) -> u64 {
    mix_seed(seed, epsilon.to_bits())
}

/// `I₁`, `I₂`, `I₃` for `φ = φ_{4-N}`, integrated annulus by annulus over
/// the pieces where `v_ε` is not constant. `params.samples` is per annulus.
pub fn criticality_integrals(family: &CutoffFamily<'_>, params: &McParams) -> Result<CriticalityIntegrals> {
    let config = family.config();
    let dim = config.dimension();
    let s = Rational::from_integer(4 - dim as i64);
    let gs = GroundState::new(config, s);
    let mut est = [0.0; 3];
    let mut var = [0.0; 3];
    let mut total_var = 0.0;
    let mut samples = 0;
    let mut excluded = 0;
    for (k, (center, r_in, r_out)) in family.annuli().into_iter().enumerate() {
        let p = McParams {
            seed: mix_seed(params.seed, k as u64 + 1),
            ..*params
        };
        let paired = annulus_integrate_paired(
            3,
            |x, out| {
                let v = family.jet(x);
                let g = config.geometry(x)?;
                let phi = gs.jet(&g);
                let grad_v_sq: f64 = v.gradient.iter().map(|d| d * d).sum();
                let dot: f64 = phi.gradient.iter().zip(&v.gradient).map(|(a, b)| a * b).sum();
                out[0] = (phi.value * v.laplacian).powi(2);
                out[1] = dot * dot;
                out[2] = (phi.value * phi.laplacian).abs() * grad_v_sq;
                Ok(())
            },
            &center,
            r_in,
            r_out,
            &p,
        )?;
        for (i, (e, v)) in est.iter_mut().zip(var.iter_mut()).enumerate() {
            *e += paired.estimate(i);
            *v += paired.std_error(i).powi(2);
        }
        let mut tv = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tv += paired.covariance(i, j);
            }
        }
        total_var += tv;
        samples += paired.samples;
        excluded += paired.excluded;
    }
    let result = |i: usize| QuadResult {
        estimate: est[i],
        std_error: var[i].sqrt(),
        samples,
        seed: params.seed,
        excluded,
    };
    Ok(CriticalityIntegrals {
        epsilon: family.epsilon(),
        i1: result(0),
        i2: result(1),
        i3: result(2),
        total: est.iter().sum(),
        total_std_error: total_var.max(0.0).sqrt(),
    })
}

/// Runs [`criticality_integrals`] at each `ε`, each with its own derived seed.
pub fn criticality_sweep(
    config: &PoleConfig,
    epsilons: &[f64],
    params: &McParams,
) -> Result<Vec<CriticalityIntegrals>> {
    epsilons
        .iter()
        .map(|&eps| {
            let family = CutoffFamily::new(config, eps)?;
            let p = McParams {
                seed: epsilon_seed(params.seed, eps),
                ..*params
            };
            let mut r = criticality_integrals(&family, &p)?;
            r.i1.seed = params.seed;
            r.i2.seed = params.seed;
            r.i3.seed = params.seed;
            Ok(r)
        })
        .collect()
}

/// Each total is below the previous one by more than `k` combined standard
/// errors.
pub fn strictly_decreasing(sweep: &[CriticalityIntegrals], k: f64) -> bool {
    sweep.windows(2).all(|w| {
        let se = (w[0].total_std_error.powi(2) + w[1].total_std_error.powi(2)).sqrt();
        w[1].total < w[0].total - k * se
    })
}

/// Relative RMS residual below which a fit counts as consistent.
pub const RATE_FIT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// Coefficient of `(log 1/ε)^{-1}`.
    pub c1: f64,
    /// Coefficient of `ε^{N-4}(log 1/ε)²`.
    pub c2: f64,
    /// RMS of `fit - total`.
    pub rms_residual: f64,
    /// RMS of `(fit - total)/total`.
    pub relative_rms: f64,
    pub consistent_with_decay: bool,
}

/// Least-squares fit of `total(ε) ≈ c₁(log 1/ε)^{-1} + c₂ε^{N-4}(log 1/ε)²`.
///
/// Both basis functions vanish as `ε → 0` for `N > 4`, so the model always
/// decays; the verdict asks that the leading term is positive and that the
/// model explains the data to [`RATE_FIT_TOLERANCE`] relative RMS.
pub fn rate_fit(dimension: usize, series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < 4 {
        return Err(Error::InsufficientData {
            got: series.len(),
            required: 4,
        });
    }
    if series.iter().any(|&(e, t)| !(e > 0.0 && e < 1.0) || !t.is_finite()) {
        return Err(Error::Precondition("rate fit needs 0 < ε < 1 and finite totals".into()));
    }
    if series.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::Precondition("ε values must be strictly decreasing".into()));
    }
    let p = dimension as f64 - 4.0;
    let basis = |e: f64| {
        let l = (1.0 / e).ln();
        (1.0 / l, e.powf(p) * l * l)
    };
    // Normal equations of the two-column problem.
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(e, t) in series {
        let (f1, f2) = basis(e);
        a11 += f1 * f1;
        a12 += f1 * f2;
        a22 += f2 * f2;
        b1 += f1 * t;
        b2 += f2 * t;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= 1e-14 * a11 * a22 {
        return Err(Error::Precondition("ε values do not separate the two rates".into()));
    }
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    let m = series.len() as f64;
    let (mut ss, mut rel) = (0.0, 0.0);
    for &(e, t) in series {
        let (f1, f2) = basis(e);
        let r = c1 * f1 + c2 * f2 - t;
        ss += r * r;
        rel += if t != 0.0 {
            (r / t).powi(2)
        } else if r == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let rms_residual = (ss / m).sqrt();
    let relative_rms = (rel / m).sqrt();
    Ok(RateFit {
        c1,
        c2,
        rms_residual,
        relative_rms,
        consistent_with_decay: c1 > 0.0 && relative_rms < RATE_FIT_TOLERANCE,
    })
}

/// `∫|Δφ|²` against `λ∫V_n φ²` for the candidate minimizer `φ = φ_{4-N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttainmentReport {
    pub laplacian_energy: QuadResult,
    /// `λ∫V_n φ²` with `λ` the sharp constant.
    pub weighted_mass: QuadResult,
    pub ratio: f64,
    pub ratio_std_error: f64,
}

/// Estimates both sides of `∫|Δφ|² = λ∫V_n φ²` for `φ = ∏|x-a_i|^{(4-N)/n}`.
/// Fails with `NonIntegrableTarget` when `|Δφ|²` is not integrable (`n = 2`).
pub fn attainment_ratio(config: &PoleConfig, params: &McParams) -> Result<AttainmentReport> {
    let dim = config.dimension();
    let s = Rational::from_integer(4 - dim as i64);
    let two = Rational::from_integer(2);
    let four = Rational::from_integer(4);
    let profile = SingularProfile {
        local_exponents: config.weights().iter().map(|a| two * s * a - four).collect(),
        infinity_exponent: two * s - four,
    };
    let sampler = build_sampler(config, &profile, &SamplerHints::default())?;
    let lambda = rational_to_f64(&sharp_constant(dim, config.len(), 2)?);
    let gs = GroundState::new(config, s);
    let vn = PotentialSpec::new(PotentialKind::Vn, config)?;
    let paired = mc_integrate_paired(
        2,
        |x, out| {
            let g = config.geometry(x)?;
            let phi = gs.value(&g);
            let lap = phi * gs.laplacian_ratio(&g);
            out[0] = lap * lap;
            out[1] = lambda * vn.eval_geometry(&g) * phi * phi;
            Ok(())
        },
        &sampler,
        params,
    )?;
    let (ratio, ratio_std_error) = paired.ratio(0, 1)?;
    Ok(AttainmentReport {
        laplacian_energy: paired.result(0),
        weighted_mass: paired.result(1),
        ratio,
        ratio_std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    PositiveCritical,
    NullCritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictParams {
    /// Samples for the attainment ratio, and per annulus for the sweep.
    pub samples: u64,
    pub seed: u64,
    pub epsilons: Vec<f64>,
    /// Largest accepted `|ratio - 1|` for the attainment evidence.
    pub ratio_band: f64,
}

impl Default for VerdictParams {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            epsilons: vec![0.2, 0.1, 0.05, 0.02],
            ratio_band: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Evidence {
    /// The minimizer has finite energy and both sides agree.
    Attainment {
        report: AttainmentReport,
        within_band: bool,
    },
    /// The cut-off energies decay to zero.
    Decay {
        sweep: Vec<CriticalityIntegrals>,
        strictly_decreasing: bool,
        fit: RateFit,
    },
}

impl Evidence {
    pub fn supports_verdict(&self) -> bool {
        match self {
            Evidence::Attainment { within_band, .. } => *within_band,
            Evidence::Decay {
                strictly_decreasing,
                fit,
                ..
            } => *strictly_decreasing && fit.consistent_with_decay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub dimension: usize,
    pub poles: usize,
    pub verdict: Criticality,
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub sharp_constant: Rational,
    pub attainability: Attainability,
    pub evidence: Evidence,
    pub evidence_supports_verdict: bool,
}

/// Positive-critical when the sharp constant is attained (every class in
/// `|Δφ|²` integrable), null-critical otherwise; the numeric evidence is the
/// attainment ratio or the cut-off decay sweep on the regular simplex.
pub fn criticality_verdict(dimension: usize, poles: usize, params: &VerdictParams) -> Result<VerdictReport> {
    if poles < 2 {
        return Err(Error::TooFewPoles {
            got: poles,
            required: 2,
        });
    }
    let attainability = attainability_verdict(dimension, poles)?;
    let config = PoleConfig::new(dimension, regular_simplex(poles, dimension)?, None)?;
    let mc = McParams::new(params.samples, params.seed);
    let (verdict, evidence) = if attainability.attained {
        let report = attainment_ratio(&config, &mc)?;
        let within_band = (report.ratio - 1.0).abs() <= params.ratio_band;
        (
            Criticality::PositiveCritical,
            Evidence::Attainment { report, within_band },
        )
    } else {
        let sweep = criticality_sweep(&config, &params.epsilons, &mc)?;
        let series: Vec<(f64, f64)> = sweep.iter().map(|r| (r.epsilon, r.total)).collect();
        let fit = rate_fit(dimension, &series)?;
        (
            Criticality::NullCritical,
            Evidence::Decay {
                strictly_decreasing: strictly_decreasing(&sweep, 3.0),
                sweep,
                fit,
            },
        )
    };
    Ok(VerdictReport {
        dimension,
        poles,
        verdict,
        sharp_constant: sharp_constant(dimension, poles, 2)?,
        attainability,
        evidence_supports_verdict: evidence.supports_verdict(),
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sphere_area;

    fn two_poles() -> PoleConfig {
        PoleConfig::new(5, regular_simplex(2, 5).unwrap(), None).unwrap()
    }

    #[test]
    fn planted_rate_is_recovered() {
        let series: Vec<(f64, f64)> = [0.1, 0.05, 0.02, 0.01]
            .iter()
            .map(|&e: &f64| (e, 2.0 / (1.0 / e).ln()))
            .collect();
        let fit = rate_fit(5, &series).unwrap();
        assert!((fit.c1 - 2.0).abs() < 1e-10, "{fit:?}");
        assert!(fit.c2.abs() < 1e-10, "{fit:?}");
        assert!(fit.rms_residual < 1e-12);
        assert!(fit.consistent_with_decay);
    }

    #[test]
    fn rate_fit_needs_four_points() {
        let r = rate_fit(5, &[(0.1, 1.0), (0.05, 0.8)]);
        assert_eq!(r, Err(Error::InsufficientData { got: 2, required: 4 }));
        let r = rate_fit(5, &[(0.01, 1.0), (0.05, 0.8), (0.1, 0.7), (0.2, 0.6)]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn growing_series_is_not_consistent() {
        let series = [(0.2, 1.0), (0.1, 3.0), (0.05, 0.5), (0.02, 4.0)];
        let fit = rate_fit(5, &series).unwrap();
        assert!(!fit.consistent_with_decay, "{fit:?}");
    }

    #[test]
    fn inner_laplacian_term_matches_the_radial_bracket() {
        // Near a₁ the integrand is |x-a₂|^{4-N} (N-2)²/(r⁴L²) r^{4-N}; with
        // the cross factor frozen this integrates to ω(N-2)²/L.
        let cfg = two_poles();
        let eps = 0.1;
        let fam = CutoffFamily::new(&cfg, eps).unwrap();
        let (center, r_in, r_out) = fam.annuli().remove(0);
        let gs = GroundState::new(&cfg, Rational::from_integer(-1));
        let r = annulus_integrate_paired(
            1,
            |x, out| {
                let g = cfg.geometry(x)?;
                out[0] = (gs.value(&g) * fam.jet(x).laplacian).powi(2);
                Ok(())
            },
            &center,
            r_in,
            r_out,
            &McParams::new(100_000, 9),
        )
        .unwrap();
        let base = sphere_area(5) * 9.0 / (1.0 / eps).ln();
        let d = cfg.min_separation().unwrap();
        let (lo, hi) = (base / (d + eps), base / (d - eps));
        let (e, se) = (r.estimate(0), r.std_error(0));
        assert!(e + 3.0 * se >= lo && e - 3.0 * se <= hi, "{e} ± {se} vs [{lo}, {hi}]");
    }

    #[test]
    fn smaller_epsilon_lowers_the_total() {
        let cfg = two_poles();
        let sweep = criticality_sweep(&cfg, &[0.2, 0.1], &McParams::new(20_000, 4)).unwrap();
        assert!(strictly_decreasing(&sweep, 3.0), "{sweep:?}");
        assert_eq!(sweep[0].row().total, sweep[0].total);
    }

    #[test]
    fn sweep_is_reproducible() {
        let cfg = two_poles();
        let a = criticality_sweep(&cfg, &[0.1], &McParams::new(5_000, 4)).unwrap();
        let b = criticality_sweep(&cfg, &[0.1], &McParams::new(5_000, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_epsilon_is_refused() {
        let cfg = two_poles();
        assert!(criticality_sweep(&cfg, &[0.25], &McParams::new(5_000, 4)).is_err());
    }

    #[test]
    fn two_pole_minimizer_has_infinite_energy() {
        let r = attainment_ratio(&two_poles(), &McParams::new(5_000, 1));
        assert!(matches!(r, Err(Error::NonIntegrableTarget(_))));
    }

    #[test]
    fn three_pole_minimizer_attains_the_constant() {
        let cfg = PoleConfig::new(5, regular_simplex(3, 5).unwrap(), None).unwrap();
        let r = attainment_ratio(&cfg, &McParams::new(200_000, 2)).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn verdicts() {
        let params = VerdictParams {
            samples: 20_000,
            ..VerdictParams::default()
        };
        let v = criticality_verdict(5, 3, &params).unwrap();
        assert_eq!(v.verdict, Criticality::PositiveCritical);
        assert_eq!(v.sharp_constant, Rational::new(25, 81));
        let v = criticality_verdict(6, 4, &params).unwrap();
        assert_eq!(v.verdict, Criticality::PositiveCritical);
        let v = criticality_verdict(5, 2, &params).unwrap();
        assert_eq!(v.verdict, Criticality::NullCritical);
        assert!(v.evidence_supports_verdict, "{v:?}");
    }
}

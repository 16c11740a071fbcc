//! Mixture importance densities adapted to power-law singularities.
//!
//! Every component is rotationally symmetric about its own center, so it is
//! described by a radial law together with a uniformly distributed direction.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::radial::sphere_area;
use crate::error::{Error, Result};
use crate::exponents::{is_integrable, Location, SingularProfile};
use crate::multipole::PoleConfig;
use crate::{rational_to_f64, Rational};

/// Radial part of a mixture component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum RadialLaw {
    /// `r = R·U^{1/β}` on `B_R`, density `β r^{β-N} / (ω R^β)`.
    /// `β = N` is the uniform ball.
    PowerBall { beta: f64, radius: f64 },
    /// `r = R₀·U^{-1/γ}` outside `B_{R₀}`, density `γ R₀^γ r^{-γ-N} / ω`.
    ParetoTail { gamma: f64, inner_radius: f64 },
    /// `log r` uniform on `[log r_in, log r_out)`, density
    /// `1 / (ω r^N log(r_out/r_in))`.
    LogShell { inner_radius: f64, outer_radius: f64 },
}

impl RadialLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialLaw::PowerBall { beta, radius } => beta > 0.0 && radius > 0.0,
            RadialLaw::ParetoTail { gamma, inner_radius } => gamma > 0.0 && inner_radius > 0.0,
            RadialLaw::LogShell {
                inner_radius,
                outer_radius,
            } => inner_radius > 0.0 && outer_radius > inner_radius,
        };
        let finite = match *self {
            RadialLaw::PowerBall { beta, radius } => beta.is_finite() && radius.is_finite(),
            RadialLaw::ParetoTail { gamma, inner_radius } => gamma.is_finite() && inner_radius.is_finite(),
            RadialLaw::LogShell {
                inner_radius,
                outer_radius,
            } => inner_radius.is_finite() && outer_radius.is_finite(),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid radial law {self:?}")))
        }
    }

    /// Draws a radius from a uniform variate `u ∈ (0, 1]`.
    fn radius(&self, u: f64) -> f64 {
        match *self {
            RadialLaw::PowerBall { beta, radius } => radius * u.powf(1.0 / beta),
            RadialLaw::ParetoTail { gamma, inner_radius } => inner_radius * u.powf(-1.0 / gamma),
            RadialLaw::LogShell {
                inner_radius,
                outer_radius,
            } => {
                // u ∈ (0, 1], so 1-u ∈ [0, 1) keeps r < r_out.
                inner_radius * (outer_radius / inner_radius).powf(1.0 - u)
            }
        }
    }

    /// Density at distance `r` from the center, as a density on `R^N`.
    fn density(&self, dimension: usize, omega: f64, r: f64) -> f64 {
        let n = dimension as f64;
        match *self {
            RadialLaw::PowerBall { beta, radius } => {
                if r >= radius || r <= 0.0 {
                    0.0
                } else {
                    beta * (r / radius).powf(beta) / (omega * r.powf(n))
                }
            }
            RadialLaw::ParetoTail { gamma, inner_radius } => {
                if r < inner_radius {
                    0.0
                } else {
                    gamma * (inner_radius / r).powf(gamma) / (omega * r.powf(n))
                }
            }
            RadialLaw::LogShell {
                inner_radius,
                outer_radius,
            } => {
                if r < inner_radius || r >= outer_radius {
                    0.0
                } else {
                    1.0 / (omega * r.powf(n) * (outer_radius / inner_radius).ln())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub weight: f64,
    pub center: Vec<f64>,
    pub law: RadialLaw,
    /// The local exponent this component was built to resolve, if any, and
    /// the finite-variance margin `p + N - β` (positive when the weighted
    /// integrand has finite variance near the center).
    pub resolves: Option<ResolvedSingularity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedSingularity {
    pub pole: usize,
    pub local_exponent: f64,
    pub variance_margin: f64,
}

/// A normalized mixture density with an optional set of excluded cores.
#[derive(Debug, Clone, Serialize)]
pub struct ImportanceSampler {
    dimension: usize,
    components: Vec<Component>,
    #[serde(skip)]
    cumulative: Vec<f64>,
    #[serde(skip)]
    omega: f64,
    excluded_centers: Vec<Vec<f64>>,
    exclusion_radius: f64,
    excluded_mass_bound: f64,
}

impl ImportanceSampler {
    /// Builds a mixture; weights must be nonnegative and sum to 1.
    pub fn new(dimension: usize, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Precondition("sampler needs at least one component".into()));
        }
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(components.len());
        for c in &components {
            if c.center.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: c.center.len(),
                });
            }
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::Precondition(format!("component weight {}", c.weight)));
            }
            c.law.validate()?;
            total += c.weight;
            cumulative.push(total);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("component weights sum to {total}")));
        }
        Ok(Self {
            dimension,
            components,
            cumulative,
            omega: sphere_area(dimension),
            excluded_centers: Vec::new(),
            exclusion_radius: 0.0,
            excluded_mass_bound: 0.0,
        })
    }

    /// Samples within `radius` of any center are dropped (they contribute 0
    /// and are counted).
    pub fn with_exclusion(mut self, centers: Vec<Vec<f64>>, radius: f64) -> Self {
        self.excluded_centers = centers;
        self.exclusion_radius = radius;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    /// Leading-order bound on `∫|f|` over the excluded cores, derived from
    /// the profile the sampler was built for (0 if none).
    pub fn excluded_mass_bound(&self) -> f64 {
        self.excluded_mass_bound
    }

    /// Smallest finite-variance margin over all pole components.
    pub fn min_variance_margin(&self) -> Option<f64> {
        self.components
            .iter()
            .filter_map(|c| c.resolves.map(|r| r.variance_margin))
            .min_by(f64::total_cmp)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let pick: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let idx = self
            .cumulative
            .iter()
            .position(|&c| pick < c)
            .unwrap_or(self.components.len() - 1);
        let comp = &self.components[idx];
        let mut norm_sq = 0.0;
        for o in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *o = z;
            norm_sq += z * z;
        }
        let u = 1.0 - rng.random::<f64>();
        let r = comp.law.radius(u);
        let scale = r / norm_sq.sqrt();
        for (o, c) in out.iter_mut().zip(&comp.center) {
            *o = c + *o * scale;
        }
    }

    /// Mixture density `q(x) = Σ w_k q_k(x)`.
    pub fn density(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| {
                let r = distance(x, &c.center);
                c.weight * c.law.density(self.dimension, self.omega, r)
            })
            .sum()
    }

    pub(crate) fn is_excluded(&self, x: &[f64]) -> bool {
        self.exclusion_radius > 0.0
            && self
                .excluded_centers
                .iter()
                .any(|c| distance(x, c) <= self.exclusion_radius)
    }
}

fn distance(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Tuning knobs for [`build_sampler`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerHints {
    /// Radius of each pole component (default: half the minimum separation,
    /// or 1 for a single pole).
    pub pole_radius: Option<f64>,
    /// Center of the bulk ball and of the outer component (default: pole
    /// centroid).
    pub center: Option<Vec<f64>>,
    /// Radius of the bulk ball (default: the smallest ball about the center
    /// containing every pole component, at least 1).
    pub bulk_radius: Option<f64>,
    /// The integrand vanishes outside `B_S(center)`. The outer component is
    /// then a log-uniform shell from the bulk radius to `S` instead of a
    /// Pareto tail, and the behavior at infinity is not checked.
    pub support_radius: Option<f64>,
    /// The integrand vanishes within this distance of every pole. Local
    /// exponents at or below `-N` are then acceptable.
    pub core_radius: Option<f64>,
    /// Fraction of the way from 0 to the divergence boundary `p + N` at which
    /// `β` is placed (and likewise `γ` at infinity).
    pub beta_fraction: f64,
    pub pole_weight: f64,
    pub tail_weight: f64,
    pub bulk_weight: f64,
}

impl Default for SamplerHints {
    fn default() -> Self {
        Self {
            pole_radius: None,
            center: None,
            bulk_radius: None,
            support_radius: None,
            core_radius: None,
            beta_fraction: 0.5,
            pole_weight: 0.5,
            tail_weight: 0.25,
            bulk_weight: 0.25,
        }
    }
}

impl SamplerHints {
    pub fn compact(center: Vec<f64>, radius: f64) -> Self {
        Self {
            center: Some(center),
            support_radius: Some(radius),
            ..Self::default()
        }
    }

    pub fn with_core(mut self, radius: f64) -> Self {
        self.core_radius = Some(radius);
        self
    }
}

/// Builds a mixture adapted to an integrand `∏|x-a_i|^{p_i}`-like profile:
/// a power-law ball at every pole with negative local exponent, a uniform
/// bulk ball, and an outer component matched to the decay at infinity (or a
/// log-uniform shell when the support is bounded).
pub fn build_sampler(
    config: &PoleConfig,
    profile: &SingularProfile,
    hints: &SamplerHints,
) -> Result<ImportanceSampler> {
    let dim = config.dimension();
    let n_f = dim as f64;
    if profile.len() != config.len() {
        return Err(Error::DimensionMismatch {
            expected: config.len(),
            got: profile.len(),
        });
    }
    if !(hints.beta_fraction > 0.0 && hints.beta_fraction < 1.0) {
        return Err(Error::Precondition(format!(
            "beta fraction {} outside (0, 1)",
            hints.beta_fraction
        )));
    }
    let verdict = is_integrable(profile, dim);
    let compact = hints.support_radius.is_some();
    let cored = hints.core_radius.is_some();
    if !verdict.integrable {
        let excused = match verdict.failing {
            Some(Location::Infinity) => compact,
            Some(Location::Pole(_)) => cored,
            None => false,
        };
        if !excused {
            return Err(Error::NonIntegrableTarget(verdict.reason));
        }
        // A core excuses the poles but the far end must still be checked.
        if cored && !compact && !(profile.infinity_exponent < -Rational::from_integer(dim as i64)) {
            return Err(Error::NonIntegrableTarget(format!(
                "infinity, exponent {} >= -{dim}",
                profile.infinity_exponent
            )));
        }
    }

    let center = match &hints.center {
        Some(c) if c.len() != dim => {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.len(),
            })
        }
        Some(c) => c.clone(),
        None => config.centroid(),
    };
    let pole_radius = hints
        .pole_radius
        .unwrap_or_else(|| config.min_separation().map_or(1.0, |d| 0.5 * d));

    let locals: Vec<f64> = profile.local_exponents.iter().map(rational_to_f64).collect();
    let singular: Vec<usize> = (0..config.len())
        .filter(|&i| locals[i] < 0.0)
        .filter(|&i| match hints.support_radius {
            Some(sr) => distance(config.pole(i), &center) < sr + pole_radius,
            None => true,
        })
        .collect();

    let reach = singular
        .iter()
        .map(|&i| distance(config.pole(i), &center) + pole_radius)
        .fold(0.0, f64::max);
    let mut bulk_radius = hints.bulk_radius.unwrap_or_else(|| reach.max(1.0));
    if let Some(sr) = hints.support_radius {
        bulk_radius = bulk_radius.min(sr);
    }
    let outer = match hints.support_radius {
        Some(sr) if sr > bulk_radius => Some(RadialLaw::LogShell {
            inner_radius: bulk_radius,
            outer_radius: sr,
        }),
        Some(_) => None,
        None => {
            // Mirror of the pole rule: f²/q ~ r^{2q+γ+N} at infinity, so the
            // second moment converges iff γ < 2(-q-N), and γ = (-q-N)/2 sits
            // at the same relative position as β = (p+N)/2 does at a pole.
            let q = rational_to_f64(&profile.infinity_exponent);
            Some(RadialLaw::ParetoTail {
                gamma: hints.beta_fraction * (-q - n_f),
                inner_radius: bulk_radius,
            })
        }
    };

    let mut weights = [
        if singular.is_empty() { 0.0 } else { hints.pole_weight },
        hints.bulk_weight,
        if outer.is_none() { 0.0 } else { hints.tail_weight },
    ];
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
        return Err(Error::Precondition(
            "mixture weights must be nonnegative, not all 0".into(),
        ));
    }
    for w in &mut weights {
        *w /= total;
    }

    // With a core the integrand is bounded near the pole, so any β > 0 has
    // finite variance; keep β large enough that most draws land outside the
    // core.
    let core_beta = hints
        .core_radius
        .filter(|&c| c > 0.0 && c < pole_radius)
        .map(|c| 1.0 / (pole_radius / c).ln());
    let mut components = Vec::new();
    for &i in &singular {
        let p = locals[i];
        let beta = match core_beta {
            Some(b) => (hints.beta_fraction * (p + n_f)).max(b),
            None => hints.beta_fraction * (p + n_f),
        };
        components.push(Component {
            weight: weights[0] / singular.len() as f64,
            center: config.pole(i).to_vec(),
            law: RadialLaw::PowerBall {
                beta,
                radius: pole_radius,
            },
            resolves: Some(ResolvedSingularity {
                pole: i,
                local_exponent: p,
                variance_margin: p + n_f - beta,
            }),
        });
    }
    components.push(Component {
        weight: weights[1],
        center: center.clone(),
        law: RadialLaw::PowerBall {
            beta: n_f,
            radius: bulk_radius,
        },
        resolves: None,
    });
    if let Some(law) = outer {
        components.push(Component {
            weight: weights[2],
            center,
            law,
            resolves: None,
        });
    }
    components.retain(|c| c.weight > 0.0);

    let mut sampler = ImportanceSampler::new(dim, components)?;
    let rho = config.exclusion_radius();
    if !cored {
        sampler.excluded_mass_bound = excluded_mass(config, &locals, rho, sampler.omega);
    }
    Ok(sampler.with_exclusion(config.poles().to_vec(), rho))
}

/// `Σ_i C_i ω ρ^{p_i+N}/(p_i+N)` with `C_i = ∏_{j≠i}|a_i-a_j|^{p_j}`, the
/// leading-order mass of `∏|x-a_j|^{p_j}` inside the balls `B_ρ(a_i)`.
fn excluded_mass(config: &PoleConfig, locals: &[f64], rho: f64, omega: f64) -> f64 {
    let n_f = config.dimension() as f64;
    (0..config.len())
        .map(|i| {
            let log_c: f64 = (0..config.len())
                .filter(|&j| j != i)
                .map(|j| 0.5 * locals[j] * config.separation_sq(i, j).ln())
                .sum();
            let e = locals[i] + n_f;
            log_c.exp() * omega * rho.powf(e) / e
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{family_exponents, singular_profile, Family};
    use crate::multipole::regular_simplex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn simplex(n: usize, dim: usize) -> PoleConfig {
        PoleConfig::new(dim, regular_simplex(n, dim).unwrap(), None).unwrap()
    }

    #[test]
    fn pole_component_beta_for_family_a() {
        let cfg = simplex(3, 5);
        let e = family_exponents(5, 3, Family::A, &[0]).unwrap();
        let profile = singular_profile(&e);
        assert_eq!(profile.local_exponents[0], Rational::new(-14, 3));
        let s = build_sampler(&cfg, &profile, &SamplerHints::default()).unwrap();
        let c0 = &s.components()[0];
        match c0.law {
            RadialLaw::PowerBall { beta, radius } => {
                assert!((beta - 1.0 / 6.0).abs() < 1e-15);
                assert!((radius - 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(s.min_variance_margin().unwrap() > 0.0);
        let total: f64 = s.components().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_integrable_profile_is_refused() {
        let cfg = simplex(2, 5);
        let e = family_exponents(5, 2, Family::A, &[0]).unwrap();
        let err = build_sampler(&cfg, &singular_profile(&e), &SamplerHints::default());
        assert!(matches!(err, Err(Error::NonIntegrableTarget(_))));
    }

    #[test]
    fn regular_profile_gets_bulk_and_tail_only() {
        let cfg = simplex(2, 5);
        // Zero local exponents but decaying fast enough to be integrable.
        let profile = SingularProfile {
            local_exponents: vec![Rational::from_integer(0); 2],
            infinity_exponent: Rational::from_integer(-7),
        };
        let s = build_sampler(&cfg, &profile, &SamplerHints::default()).unwrap();
        assert_eq!(s.components().len(), 2);
        assert!(matches!(s.components()[0].law, RadialLaw::PowerBall { .. }));
        assert!(matches!(s.components()[1].law, RadialLaw::ParetoTail { .. }));
        assert!((s.components()[0].weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_profile_needs_compact_support() {
        let cfg = simplex(2, 5);
        let profile = singular_profile(&[Rational::from_integer(0); 2]);
        assert!(build_sampler(&cfg, &profile, &SamplerHints::default()).is_err());
        let s = build_sampler(&cfg, &profile, &SamplerHints::compact(vec![0.0; 5], 0.8)).unwrap();
        assert_eq!(s.components().len(), 1);
        let s = build_sampler(&cfg, &profile, &SamplerHints::compact(vec![0.0; 5], 20.0)).unwrap();
        assert_eq!(s.components().len(), 2);
        assert!(matches!(s.components()[1].law, RadialLaw::LogShell { .. }));
    }

    #[test]
    fn core_admits_borderline_exponents() {
        let cfg = simplex(2, 5);
        let e = family_exponents(5, 2, Family::A, &[0]).unwrap();
        let profile = singular_profile(&e);
        let hints = SamplerHints::default().with_core(1e-4);
        let s = build_sampler(&cfg, &profile, &hints).unwrap();
        for c in s.components() {
            if let RadialLaw::PowerBall { beta, .. } = c.law {
                assert!(beta > 0.0);
            }
        }
    }

    #[test]
    fn samples_land_where_the_density_is_positive() {
        let cfg = simplex(3, 5);
        let e = family_exponents(5, 3, Family::B, &[0, 1]).unwrap();
        let s = build_sampler(&cfg, &singular_profile(&e), &SamplerHints::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut x = vec![0.0; 5];
        for _ in 0..2000 {
            s.sample(&mut rng, &mut x);
            let q = s.density(&x);
            assert!(q > 0.0 && q.is_finite(), "q={q} at {x:?}");
        }
    }

    #[test]
    fn radial_laws_integrate_to_one() {
        // ∫ q = ω ∫ q(r) r^{N-1} dr, checked by the trapezoid rule in log r.
        let dim = 6;
        let omega = sphere_area(dim);
        let laws = [
            RadialLaw::PowerBall { beta: 0.7, radius: 2.0 },
            RadialLaw::PowerBall { beta: 6.0, radius: 1.5 },
            RadialLaw::ParetoTail {
                gamma: 1.3,
                inner_radius: 0.5,
            },
            RadialLaw::LogShell {
                inner_radius: 0.01,
                outer_radius: 0.1,
            },
        ];
        for law in laws {
            let (lo, hi) = (-30.0f64, 40.0f64);
            let steps = 200_000;
            let h = (hi - lo) / steps as f64;
            let mut acc = 0.0;
            for k in 0..=steps {
                let t = lo + k as f64 * h;
                let r = t.exp();
                let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                acc += w * omega * law.density(dim, omega, r) * r.powi(dim as i32);
            }
            assert!((acc * h - 1.0).abs() < 2e-3, "{law:?}: {}", acc * h);
        }
    }
}

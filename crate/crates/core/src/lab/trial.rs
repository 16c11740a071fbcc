//! Trial functions with closed-form gradient and Laplacian.

use serde::Serialize;

use crate::criticality::CutoffFamily;
use crate::error::{Error, Result};
use crate::exponents::SingularProfile;
use crate::multipole::{GroundState, PoleConfig};
use crate::quadrature::{build_sampler, ImportanceSampler, SamplerHints};
use crate::{rational_to_f64, Rational};

/// Value, gradient and Laplacian at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl Jet {
    pub fn zero(dimension: usize) -> Self {
        Self {
            value: 0.0,
            gradient: vec![0.0; dimension],
            laplacian: 0.0,
        }
    }

    pub fn constant(dimension: usize, value: f64) -> Self {
        Self {
            value,
            ..Self::zero(dimension)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.laplacian == 0.0 && self.gradient.iter().all(|g| *g == 0.0)
    }

    /// Product rule: `(fg)`, `∇(fg) = f∇g + g∇f`, `Δ(fg) = fΔg + gΔf + 2∇f·∇g`.
    pub fn mul(&self, other: &Jet) -> Jet {
        let dot: f64 = self.gradient.iter().zip(&other.gradient).map(|(a, b)| a * b).sum();
        Jet {
            value: self.value * other.value,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(a, b)| self.value * b + other.value * a)
                .collect(),
            laplacian: self.value * other.laplacian + other.value * self.laplacian + 2.0 * dot,
        }
    }

    pub fn scale(mut self, c: f64) -> Jet {
        self.value *= c;
        self.laplacian *= c;
        self.gradient.iter_mut().for_each(|g| *g *= c);
        self
    }

    pub fn gradient_norm_sq(&self) -> f64 {
        self.gradient.iter().map(|g| g * g).sum()
    }
}

/// `S(t) = 6t⁵ - 15t⁴ + 10t³` clamped to `[0, 1]`, with `S'` and `S''`.
/// `S` is C² at both ends.
fn smootherstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        let s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (s, s1, s2)
    }
}

/// Radial cut-off about `center` going from 0 at `r0` to 1 at `r1` (or from
/// 1 to 0 when `rising` is false), smootherstep in `log r`.
fn log_radial_cutoff(x: &[f64], center: &[f64], r0: f64, r1: f64, rising: bool) -> Jet {
    let dim = x.len();
    let offset: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let r = offset.iter().map(|d| d * d).sum::<f64>().sqrt();
    let ln = (r1 / r0).ln();
    let t = if r > 0.0 { (r / r0).ln() / ln } else { f64::NEG_INFINITY };
    let (s, s1, s2) = smootherstep(t);
    let (value, d1, d2) = if s1 == 0.0 && s2 == 0.0 {
        (s, 0.0, 0.0)
    } else {
        let d1 = s1 / (ln * r);
        let d2 = s2 / (ln * ln * r * r) - s1 / (ln * r * r);
        (s, d1, d2)
    };
    let lap = if d1 == 0.0 && d2 == 0.0 {
        0.0
    } else {
        d2 + (dim as f64 - 1.0) * d1 / r
    };
    let jet = Jet {
        value,
        gradient: if d1 == 0.0 {
            vec![0.0; dim]
        } else {
            offset.iter().map(|o| d1 * o / r).collect()
        },
        laplacian: lap,
    };
    if rising {
        jet
    } else {
        Jet {
            value: 1.0 - jet.value,
            gradient: jet.gradient.into_iter().map(|g| -g).collect(),
            laplacian: -jet.laplacian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TrialKind {
    /// `exp(-1/(1-|x-c|²/R²))` on `B_R(c)`.
    Bump { center: Vec<f64>, radius: f64 },
    /// `φ_s · Π_i h(|x-a_i|) · η(|x|)`: `h` rises from 0 at `δ/2` to 1 at `δ`
    /// and `η` falls from 1 at `R` to 0 at `2R`, both smootherstep in log r.
    MollifiedGroundState {
        #[serde(serialize_with = "crate::exponents::ser_rational")]
        s: Rational,
        far_radius: f64,
        near_radius: f64,
    },
    /// `φ_{4-N} · v_ε`.
    CutoffGroundState { epsilon: f64 },
}

#[derive(Debug, Clone)]
pub struct TrialFunction<'a> {
    kind: TrialKind,
    config: &'a PoleConfig,
    amplitude: f64,
    ground: Option<GroundState<'a>>,
    cutoff: Option<CutoffFamily<'a>>,
}

impl<'a> TrialFunction<'a> {
    pub fn bump(config: &'a PoleConfig, center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != config.dimension() {
            return Err(Error::DimensionMismatch {
                expected: config.dimension(),
                got: center.len(),
            });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Precondition(format!("bump radius {radius}")));
        }
        Ok(Self {
            kind: TrialKind::Bump { center, radius },
            config,
            amplitude: 1.0,
            ground: None,
            cutoff: None,
        })
    }

    pub fn mollified(config: &'a PoleConfig, s: Rational, far_radius: f64, near_radius: f64) -> Result<Self> {
        if !(near_radius > 0.0 && far_radius.is_finite()) {
            return Err(Error::Precondition(format!(
                "need 0 < δ and finite R, got δ={near_radius}, R={far_radius}"
            )));
        }
        if let Some(sep) = config.min_separation() {
            if near_radius >= 0.5 * sep {
                return Err(Error::Precondition(format!(
                    "near radius {near_radius} must be below half the pole separation {sep}"
                )));
            }
        }
        if far_radius <= config.max_pole_norm() + near_radius {
            return Err(Error::Precondition(format!(
                "far radius {far_radius} must enclose every pole neighbourhood"
            )));
        }
        Ok(Self {
            kind: TrialKind::MollifiedGroundState {
                s,
                far_radius,
                near_radius,
            },
            config,
            amplitude: 1.0,
            ground: Some(GroundState::new(config, s)),
            cutoff: None,
        })
    }

    pub fn cutoff(config: &'a PoleConfig, epsilon: f64) -> Result<Self> {
        let s = Rational::from_integer(4 - config.dimension() as i64);
        Ok(Self {
            kind: TrialKind::CutoffGroundState { epsilon },
            config,
            amplitude: 1.0,
            ground: Some(GroundState::new(config, s)),
            cutoff: Some(CutoffFamily::new(config, epsilon)?),
        })
    }

    /// `c·u`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn kind(&self) -> &TrialKind {
        &self.kind
    }

    pub fn config(&self) -> &'a PoleConfig {
        self.config
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn jet(&self, x: &[f64]) -> Result<Jet> {
        let dim = self.config.dimension();
        let jet = match &self.kind {
            TrialKind::Bump { center, radius } => bump_jet(x, center, *radius),
            TrialKind::MollifiedGroundState {
                far_radius,
                near_radius,
                ..
            } => {
                let mut psi = Jet::constant(dim, 1.0);
                for a in self.config.poles() {
                    let h = log_radial_cutoff(x, a, 0.5 * near_radius, *near_radius, true);
                    if h.value == 0.0 {
                        return Ok(Jet::zero(dim));
                    }
                    psi = psi.mul(&h);
                }
                let origin = vec![0.0; dim];
                let eta = log_radial_cutoff(x, &origin, *far_radius, 2.0 * far_radius, false);
                if eta.value == 0.0 {
                    return Ok(Jet::zero(dim));
                }
                psi = psi.mul(&eta);
                self.ground_jet(x)?.mul(&psi)
            }
            TrialKind::CutoffGroundState { .. } => {
                let v = self.cutoff.as_ref().expect("cutoff trial").jet(x);
                if v.value == 0.0 && v.laplacian == 0.0 {
                    return Ok(Jet::zero(dim));
                }
                let v = Jet {
                    value: v.value,
                    gradient: v.gradient,
                    laplacian: v.laplacian,
                };
                self.ground_jet(x)?.mul(&v)
            }
        };
        Ok(jet.scale(self.amplitude))
    }

    fn ground_jet(&self, x: &[f64]) -> Result<Jet> {
        let gs = self.ground.as_ref().expect("ground-state trial");
        let g = self.config.geometry(x)?;
        let j = gs.jet(&g);
        Ok(Jet {
            value: j.value,
            gradient: j.gradient,
            laplacian: j.laplacian,
        })
    }

    /// An importance sampler for integrands of the form
    /// `u² · |x-a_i|^{pole_power}` near the poles (`pole_power = -2σ` for the
    /// order-σ quotients).
    pub fn sampler(&self, pole_power: i64) -> Result<ImportanceSampler> {
        let dim = self.config.dimension();
        let n = self.config.len();
        let power = Rational::from_integer(pole_power);
        match &self.kind {
            TrialKind::Bump { center, radius } => {
                let locals = (0..n)
                    .map(|i| {
                        let d = dist(self.config.pole(i), center);
                        if d < *radius {
                            power
                        } else {
                            Rational::from_integer(0)
                        }
                    })
                    .collect();
                let profile = SingularProfile {
                    local_exponents: locals,
                    infinity_exponent: Rational::from_integer(0),
                };
                let hints = SamplerHints {
                    pole_radius: Some(self.pole_radius().min(*radius)),
                    ..SamplerHints::compact(center.clone(), *radius)
                };
                build_sampler(self.config, &profile, &hints)
            }
            TrialKind::MollifiedGroundState {
                s,
                far_radius,
                near_radius,
            } => {
                let profile = self.ground_profile(*s, power);
                let hints = SamplerHints {
                    center: Some(vec![0.0; dim]),
                    ..SamplerHints::compact(vec![0.0; dim], 2.0 * far_radius)
                }
                .with_core(0.5 * near_radius);
                build_sampler(self.config, &profile, &hints)
            }
            TrialKind::CutoffGroundState { epsilon } => {
                let s = Rational::from_integer(4 - dim as i64);
                let profile = self.ground_profile(s, power);
                let hints =
                    SamplerHints::compact(vec![0.0; dim], 1.0 / (epsilon * epsilon)).with_core(epsilon * epsilon);
                build_sampler(self.config, &profile, &hints)
            }
        }
    }

    fn pole_radius(&self) -> f64 {
        self.config.min_separation().map_or(1.0, |d| 0.5 * d)
    }

    /// Profile of `φ_s² |x-a_i|^{power}`.
    fn ground_profile(&self, s: Rational, power: Rational) -> SingularProfile {
        let two = Rational::from_integer(2);
        let locals: Vec<Rational> = self.config.weights().iter().map(|a| two * s * a + power).collect();
        SingularProfile {
            local_exponents: locals,
            infinity_exponent: two * s + power,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match &self.kind {
            TrialKind::Bump { center, radius } => format!("bump(c={center:?}, R={radius})"),
            TrialKind::MollifiedGroundState {
                s,
                far_radius,
                near_radius,
            } => format!("mollified(s={}, δ={near_radius}, R={far_radius})", rational_to_f64(s)),
            TrialKind::CutoffGroundState { epsilon } => format!("cutoff(ε={epsilon})"),
        }
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `b = exp(-1/(1-t))`, `t = ρ²/R²`:
/// `∇b = g'(t)·2(x-c)/R²`, `Δb = g''(t)·4ρ²/R⁴ + g'(t)·2N/R²` with
/// `g' = -g/(1-t)²`, `g'' = g/(1-t)⁴ - 2g/(1-t)³`.
fn bump_jet(x: &[f64], center: &[f64], radius: f64) -> Jet {
    let dim = x.len();
    let offset: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let rho2: f64 = offset.iter().map(|d| d * d).sum();
    let r2 = radius * radius;
    let t = rho2 / r2;
    if t >= 1.0 {
        return Jet::zero(dim);
    }
    let w = 1.0 / (1.0 - t);
    let g = (-w).exp();
    if g == 0.0 {
        return Jet::zero(dim);
    }
    let g1 = -g * w * w;
    let g2 = g * w * w * w * w - 2.0 * g * w * w * w;
    Jet {
        value: g,
        gradient: offset.iter().map(|o| g1 * 2.0 * o / r2).collect(),
        laplacian: g2 * 4.0 * rho2 / (r2 * r2) + g1 * 2.0 * dim as f64 / r2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::fd::{fd_derivative, DerivativeOrder};
    use crate::multipole::regular_simplex;

    fn simplex(n: usize, dim: usize) -> PoleConfig {
        PoleConfig::new(dim, regular_simplex(n, dim).unwrap(), None).unwrap()
    }

    fn check_jet(trial: &TrialFunction<'_>, x: &[f64], tol: f64) {
        let jet = trial.jet(x).unwrap();
        let f = |y: &[f64]| trial.jet(y).unwrap().value;
        // Step relative to |x| so far-field points are not swamped by roundoff.
        let step = 1e-4 * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let lap = fd_derivative(f, x, DerivativeOrder::Laplacian, Some(step), &[]).unwrap();
        let scale = jet.laplacian.abs().max(1e-8);
        assert!(
            (lap - jet.laplacian).abs() < tol * scale,
            "{} at {x:?}: fd {lap} vs {}",
            trial.label(),
            jet.laplacian
        );
        let h = 1e-6;
        for k in 0..x.len() {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += h;
            m[k] -= h;
            let fd = (f(&p) - f(&m)) / (2.0 * h);
            let gscale = jet.gradient[k].abs().max(1e-6);
            assert!(
                (fd - jet.gradient[k]).abs() < 1e-5 * gscale.max(jet.value.abs()),
                "grad {k}"
            );
        }
    }

    #[test]
    fn bump_derivatives() {
        let cfg = simplex(2, 5);
        let bump = TrialFunction::bump(&cfg, vec![0.1, 0.2, 0.0, -0.1, 0.0], 0.8).unwrap();
        check_jet(&bump, &[0.3, 0.1, 0.2, -0.3, 0.1], 1e-6);
        check_jet(&bump, &[0.1, 0.2, 0.0, -0.1, 0.0], 1e-6);
        let far = bump.jet(&[2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(far.is_zero());
    }

    #[test]
    fn mollified_derivatives() {
        let cfg = simplex(3, 5);
        let trial = TrialFunction::mollified(&cfg, Rational::from_integer(-1), 3.0, 0.2).unwrap();
        let a = cfg.pole(0).to_vec();
        // In the near transition zone, the plateau, and the far transition zone.
        let near: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 4 { v + 0.15 } else { *v })
            .collect();
        check_jet(&trial, &near, 1e-5);
        check_jet(&trial, &[0.4, -0.3, 0.2, 0.1, 0.3], 1e-5);
        check_jet(&trial, &[3.5, 1.0, 0.5, -1.0, 2.0], 1e-5);
        let inner: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 4 { v + 0.09 } else { *v })
            .collect();
        assert!(trial.jet(&inner).unwrap().is_zero());
        assert!(trial.jet(&[7.0, 0.0, 0.0, 0.0, 0.0]).unwrap().is_zero());
    }

    #[test]
    fn cutoff_trial_derivatives() {
        let cfg = simplex(2, 5);
        let trial = TrialFunction::cutoff(&cfg, 0.1).unwrap();
        let a = cfg.pole(1).to_vec();
        let inner: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 2 { v + 0.03 } else { *v })
            .collect();
        check_jet(&trial, &inner, 1e-4);
        check_jet(&trial, &[20.0, 10.0, 0.0, 5.0, -30.0], 1e-4);
    }

    #[test]
    fn scaling_multiplies_the_jet() {
        let cfg = simplex(2, 5);
        let bump = TrialFunction::bump(&cfg, vec![0.0; 5], 0.5).unwrap();
        let x = [0.1, 0.1, 0.0, 0.0, 0.0];
        let j1 = bump.jet(&x).unwrap();
        let j7 = bump.clone().scaled(7.0).jet(&x).unwrap();
        assert_eq!(j7.value, 7.0 * j1.value);
    }

    #[test]
    fn samplers_build_for_every_kind() {
        let cfg = simplex(3, 5);
        let bump = TrialFunction::bump(&cfg, cfg.pole(0).to_vec(), 0.3).unwrap();
        assert!(bump.sampler(-4).unwrap().components().len() >= 2);
        let moll = TrialFunction::mollified(&cfg, Rational::from_integer(-1), 20.0, 0.05).unwrap();
        moll.sampler(-4).unwrap();
        moll.sampler(-2).unwrap();
        let pair = simplex(2, 5);
        let cut = TrialFunction::cutoff(&pair, 0.05).unwrap();
        cut.sampler(-4).unwrap();
    }

    #[test]
    fn invalid_trials() {
        let cfg = simplex(3, 5);
        assert!(TrialFunction::bump(&cfg, vec![0.0; 4], 1.0).is_err());
        assert!(TrialFunction::mollified(&cfg, Rational::from_integer(-1), 20.0, 0.6).is_err());
        assert!(TrialFunction::mollified(&cfg, Rational::from_integer(-1), 0.5, 0.1).is_err());
    }
}

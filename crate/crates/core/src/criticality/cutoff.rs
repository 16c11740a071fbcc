//! The piecewise-logarithmic cut-off `v_ε`.
//!
//! ```text
//! v_ε(x) = 0                                   |x-a_i| < ε²
//!          log(|x-a_i|/ε²) / log(1/ε)           ε² ≤ |x-a_i| < ε
//!          1                                   elsewhere in B_{1/ε}(0)
//!          log(ε²|x|) / log ε                   1/ε ≤ |x| < 1/ε²
//!          0                                   |x| ≥ 1/ε²
//! ```
//!
//! The function is Lipschitz across the four seams and smooth inside each
//! piece; derivatives are reported piecewise (zero on the constant pieces).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipole::PoleConfig;

/// Which piece of `v_ε` a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffRegion {
    Core(usize),
    InnerAnnulus(usize),
    Plateau,
    OuterAnnulus,
    Exterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
    pub region: CutoffRegion,
}

/// Scalar quantities [`eval_cutoff`] can return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffQuantity {
    Value,
    GradientNorm,
    Laplacian,
}

#[derive(Debug, Clone)]
pub struct CutoffFamily<'a> {
    config: &'a PoleConfig,
    epsilon: f64,
    log_inv: f64,
}

/// Largest admissible `ε`: `min(1/2, separation/4, 1/(2·max|a_i|+1))`.
pub fn epsilon_max(config: &PoleConfig) -> f64 {
    let sep = config.min_separation().unwrap_or(f64::INFINITY);
    0.5f64.min(sep / 4.0).min(1.0 / (2.0 * config.max_pole_norm() + 1.0))
}

impl<'a> CutoffFamily<'a> {
    /// Requires `0 < ε < ε_max`, which keeps the five pieces disjoint.
    pub fn new(config: &'a PoleConfig, epsilon: f64) -> Result<Self> {
        let max = epsilon_max(config);
        if !(epsilon > 0.0 && epsilon < max) {
            return Err(Error::Precondition(format!(
                "epsilon {epsilon} outside (0, {max}) for this configuration"
            )));
        }
        Ok(Self {
            config,
            epsilon,
            log_inv: (1.0 / epsilon).ln(),
        })
    }

    pub fn config(&self) -> &'a PoleConfig {
        self.config
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The annuli on which `v_ε` is non-constant, as `(center, r_in, r_out)`:
    /// one inner annulus per pole, then the outer annulus about the origin.
    pub fn annuli(&self) -> Vec<(Vec<f64>, f64, f64)> {
        let e = self.epsilon;
        let mut out: Vec<(Vec<f64>, f64, f64)> = self.config.poles().iter().map(|a| (a.clone(), e * e, e)).collect();
        out.push((vec![0.0; self.config.dimension()], 1.0 / e, 1.0 / (e * e)));
        out
    }

    pub fn region(&self, x: &[f64]) -> CutoffRegion {
        let e = self.epsilon;
        let r0 = norm(x);
        if r0 >= 1.0 / (e * e) {
            return CutoffRegion::Exterior;
        }
        for (i, a) in self.config.poles().iter().enumerate() {
            let r = dist(x, a);
            if r < e * e {
                return CutoffRegion::Core(i);
            }
            if r < e {
                return CutoffRegion::InnerAnnulus(i);
            }
        }
        if r0 >= 1.0 / e {
            CutoffRegion::OuterAnnulus
        } else {
            CutoffRegion::Plateau
        }
    }

    pub fn jet(&self, x: &[f64]) -> CutoffJet {
        let dim = self.config.dimension();
        let nm2 = dim as f64 - 2.0;
        let l = self.log_inv;
        let e = self.epsilon;
        let region = self.region(x);
        let zero = |value: f64| CutoffJet {
            value,
            gradient: vec![0.0; dim],
            laplacian: 0.0,
            region,
        };
        match region {
            CutoffRegion::Core(_) | CutoffRegion::Exterior => zero(0.0),
            CutoffRegion::Plateau => zero(1.0),
            CutoffRegion::InnerAnnulus(i) => {
                let a = self.config.pole(i);
                let r2: f64 = x.iter().zip(a).map(|(p, q)| (p - q) * (p - q)).sum();
                let r = r2.sqrt();
                CutoffJet {
                    value: (r / (e * e)).ln() / l,
                    gradient: x.iter().zip(a).map(|(p, q)| (p - q) / (r2 * l)).collect(),
                    laplacian: nm2 / (r2 * l),
                    region,
                }
            }
            CutoffRegion::OuterAnnulus => {
                let r2: f64 = x.iter().map(|p| p * p).sum();
                let r = r2.sqrt();
                CutoffJet {
                    value: (e * e * r).ln() / e.ln(),
                    gradient: x.iter().map(|p| -p / (r2 * l)).collect(),
                    laplacian: -nm2 / (r2 * l),
                    region,
                }
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }
}

/// One scalar attribute of `v_ε` at `x`.
pub fn eval_cutoff(family: &CutoffFamily<'_>, x: &[f64], what: CutoffQuantity) -> f64 {
    let jet = family.jet(x);
    match what {
        CutoffQuantity::Value => jet.value,
        CutoffQuantity::GradientNorm => norm(&jet.gradient),
        CutoffQuantity::Laplacian => jet.laplacian,
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

//! Residual checks for the ground-state identities.
//!
//! With `g = ∇φ/φ`, `L = Δφ/φ` and `B = Δ²φ/φ`, and `v = u/φ`:
//!
//! * first order: `∫|∇u - g u|² = ∫|∇u|² + ∫L u²`;
//! * second order: `∫|Δu|² - ∫B u² = ∫|φΔv + 2∇φ·∇v|² - 2∫φΔφ|∇v|²`, where
//!   `φΔv + 2∇φ·∇v = Δu - L u` and `φΔφ|∇v|² = L|∇u - g u|²`;
//! * pointwise: the ξ double sum equals `s(s-4)/(s-2)²` times the ζ single sum.
//!
//! The integrands of the two sides differ by a divergence, so the integral
//! checks are paired: both sides are estimated from one sample stream and the
//! difference is compared with its own standard error.

use serde::{Deserialize, Serialize};

use super::trial::TrialFunction;
use crate::error::{Error, Result};
use crate::multipole::{exponent_tables, xi_zeta_factor, GroundState, PoleConfig};
use crate::quadrature::{mc_integrate_paired, McParams, QuadResult};
use crate::{rational_to_f64, Rational};

pub const RESIDUAL_FLOOR: f64 = 1e-30;
pub const POINTWISE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    /// First-order ground-state identity.
    Hardy,
    /// Second-order ground-state identity.
    Rellich,
    /// Pointwise ξ/ζ proportionality.
    XiZeta,
}

impl IdentityId {
    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Hardy => "hardy_identity",
            IdentityId::Rellich => "rellich_identity",
            IdentityId::XiZeta => "xi_zeta_identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity: IdentityId,
    pub label: String,
    pub left: QuadResult,
    pub right: QuadResult,
    /// `|left - right| / max(|left|, |right|, 1e-30)`.
    pub residual: f64,
    /// Standard error of `left - right` (0 for pointwise checks).
    pub difference_std_error: f64,
    /// The bound `|left - right|` was held to.
    pub tolerance: f64,
    pub pass: bool,
}

pub fn relative_residual(left: f64, right: f64) -> f64 {
    (left - right).abs() / left.abs().max(right.abs()).max(RESIDUAL_FLOOR)
}

/// What an identity is checked on.
#[derive(Debug, Clone)]
pub enum IdentityInput<'a, 'b> {
    Trial {
        trial: &'b TrialFunction<'a>,
        params: McParams,
    },
    Points(&'b [Vec<f64>]),
}

/// Checks identity `id` for the ground state `φ_s` of `config`.
pub fn check_identity(
    id: IdentityId,
    config: &PoleConfig,
    s: Rational,
    input: IdentityInput<'_, '_>,
) -> Result<ResidualReport> {
    match (id, input) {
        (IdentityId::Hardy, IdentityInput::Trial { trial, params }) => check_hardy_identity(trial, config, s, &params),
        (IdentityId::Rellich, IdentityInput::Trial { trial, params }) => {
            check_rellich_identity(trial, config, s, &params)
        }
        (IdentityId::XiZeta, IdentityInput::Points(points)) => check_xi_zeta_identity(config, s, points),
        (id, _) => Err(Error::Precondition(format!(
            "{} needs {}",
            id.name(),
            if id == IdentityId::XiZeta {
                "evaluation points"
            } else {
                "a trial function"
            }
        ))),
    }
}

fn paired_report(
    id: IdentityId,
    label: String,
    trial: &TrialFunction<'_>,
    config: &PoleConfig,
    pole_power: i64,
    params: &McParams,
    integrand: impl Fn(&[f64], &super::trial::Jet, &mut [f64]) -> Result<()> + Sync,
) -> Result<ResidualReport> {
    if !std::ptr::eq(trial.config(), config) && trial.config().poles() != config.poles() {
        return Err(Error::Precondition("trial and identity use different poles".into()));
    }
    let sampler = trial.sampler(pole_power)?;
    let paired = mc_integrate_paired(
        2,
        |x, out| {
            let jet = trial.jet(x)?;
            if jet.is_zero() {
                return Ok(());
            }
            integrand(x, &jet, out)
        },
        &sampler,
        params,
    )?;
    let left = paired.result(0);
    let right = paired.result(1);
    let se = paired.difference_std_error(0, 1);
    let diff = (left.estimate - right.estimate).abs();
    let tolerance = 3.0 * se;
    Ok(ResidualReport {
        identity: id,
        label,
        left,
        right,
        residual: relative_residual(left.estimate, right.estimate),
        difference_std_error: se,
        tolerance,
        pass: diff <= tolerance || diff <= 1e-12 * left.estimate.abs().max(right.estimate.abs()),
    })
}

/// `∫|∇u - g u|²` against `∫|∇u|² + ∫L u²` for `φ = φ_s`.
pub fn check_hardy_identity(
    trial: &TrialFunction<'_>,
    config: &PoleConfig,
    s: Rational,
    params: &McParams,
) -> Result<ResidualReport> {
    let gs = GroundState::new(config, s);
    paired_report(
        IdentityId::Hardy,
        trial.label(),
        trial,
        config,
        -2,
        params,
        |x, u, out| {
            let geo = config.geometry(x)?;
            let g = gs.gradient_ratio(&geo);
            let l = gs.laplacian_ratio(&geo);
            let shifted: f64 = u
                .gradient
                .iter()
                .zip(&g)
                .map(|(du, gi)| (du - gi * u.value).powi(2))
                .sum();
            out[0] = shifted;
            out[1] = u.gradient_norm_sq() + l * u.value * u.value;
            Ok(())
        },
    )
}

/// `∫|Δu|² - ∫B u²` against `∫|Δu - L u|² - 2∫L|∇u - g u|²` for `φ = φ_s`.
pub fn check_rellich_identity(
    trial: &TrialFunction<'_>,
    config: &PoleConfig,
    s: Rational,
    params: &McParams,
) -> Result<ResidualReport> {
    exponent_tables(config, s)?;
    let gs = GroundState::new(config, s);
    paired_report(
        IdentityId::Rellich,
        trial.label(),
        trial,
        config,
        -4,
        params,
        |x, u, out| {
            let geo = config.geometry(x)?;
            let g = gs.gradient_ratio(&geo);
            let l = gs.laplacian_ratio(&geo);
            let b = gs.bilaplacian_ratio(&geo)?;
            let shifted: f64 = u
                .gradient
                .iter()
                .zip(&g)
                .map(|(du, gi)| (du - gi * u.value).powi(2))
                .sum();
            out[0] = u.laplacian * u.laplacian - b * u.value * u.value;
            out[1] = (u.laplacian - l * u.value).powi(2) - 2.0 * l * shifted;
            Ok(())
        },
    )
}

/// The ξ/ζ proportionality at each point; reports the worst point.
pub fn check_xi_zeta_identity(config: &PoleConfig, s: Rational, points: &[Vec<f64>]) -> Result<ResidualReport> {
    if points.is_empty() {
        return Err(Error::InsufficientData { got: 0, required: 1 });
    }
    let tables = exponent_tables(config, s)?;
    let factor = rational_to_f64(&xi_zeta_factor(s)?);
    let mut worst: Option<(f64, f64, f64)> = None;
    for x in points {
        let g = config.geometry(x)?;
        let left = tables.xi_double_sum(config, &g);
        let right = factor * tables.zeta_single_sum(config, &g);
        let r = relative_residual(left, right);
        if worst.is_none_or(|(w, _, _)| r > w) {
            worst = Some((r, left, right));
        }
    }
    let (residual, left, right) = worst.expect("non-empty");
    let point_result = |v: f64| QuadResult {
        estimate: v,
        std_error: 0.0,
        samples: points.len() as u64,
        seed: 0,
        excluded: 0,
    };
    Ok(ResidualReport {
        identity: IdentityId::XiZeta,
        label: format!("{} points, s={}", points.len(), s),
        left: point_result(left),
        right: point_result(right),
        residual,
        difference_std_error: 0.0,
        tolerance: POINTWISE_TOLERANCE,
        pass: residual < POINTWISE_TOLERANCE,
    })
}

//! Rayleigh quotients, inequality margins and sharpness sweeps.

use serde::{Deserialize, Serialize};

use super::trial::TrialFunction;
use crate::error::{Error, Result};
use crate::multipole::{sharp_constant, PoleConfig, PotentialKind, PotentialSpec};
use crate::quadrature::{mc_integrate_paired, McParams, QuadResult};
use crate::{rational_to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientReport {
    pub label: String,
    pub order: u8,
    pub quotient: f64,
    pub std_error: f64,
    /// `∫|∇u|²` (order 1) or `∫|Δu|²` (order 2).
    pub numerator: QuadResult,
    /// `∫V u²`.
    pub denominator: QuadResult,
}

/// `‖u‖²_{σ,2} / ∫V u²` with a delta-method standard error, both integrals
/// from one sample stream.
pub fn rayleigh_quotient(
    trial: &TrialFunction<'_>,
    potential: &PotentialSpec<'_>,
    order: u8,
    params: &McParams,
) -> Result<QuotientReport> {
    if !(order == 1 || order == 2) {
        return Err(Error::Precondition(format!("order must be 1 or 2, got {order}")));
    }
    let config = potential.config();
    let pole_power = potential.kind().pole_order().min(-2 * order as i64);
    let sampler = trial.sampler(pole_power)?;
    let paired = mc_integrate_paired(
        2,
        |x, out| {
            let u = trial.jet(x)?;
            if u.value == 0.0 && u.laplacian == 0.0 && u.gradient.iter().all(|g| *g == 0.0) {
                return Ok(());
            }
            let geo = config.geometry(x)?;
            out[0] = if order == 1 {
                u.gradient_norm_sq()
            } else {
                u.laplacian * u.laplacian
            };
            out[1] = potential.eval_geometry(&geo) * u.value * u.value;
            Ok(())
        },
        &sampler,
        params,
    )?;
    let (quotient, std_error) = paired.ratio(0, 1)?;
    Ok(QuotientReport {
        label: trial.label(),
        order,
        quotient,
        std_error,
        numerator: paired.result(0),
        denominator: paired.result(1),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub quotient: QuotientReport,
    pub lambda: f64,
    /// `quotient - λ`.
    pub margin: f64,
    pub margin_std_error: f64,
    /// `margin ≥ -3·std_error`.
    pub pass: bool,
}

/// Checks `‖u‖²_{σ,2} ≥ λ ∫V u²` through the Rayleigh quotient.
pub fn verify_inequality(
    trial: &TrialFunction<'_>,
    potential: &PotentialSpec<'_>,
    lambda: f64,
    order: u8,
    params: &McParams,
) -> Result<InequalityReport> {
    let quotient = rayleigh_quotient(trial, potential, order, params)?;
    let margin = quotient.quotient - lambda;
    let margin_std_error = quotient.std_error;
    Ok(InequalityReport {
        pass: margin >= -3.0 * margin_std_error,
        quotient,
        lambda,
        margin,
        margin_std_error,
    })
}

/// A family of trial functions approaching the extremal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum SharpnessSweep {
    /// Mollified ground states `φ_s` at each `(δ, R)`.
    Mollified {
        #[serde(
            serialize_with = "crate::exponents::ser_rational",
            deserialize_with = "crate::exponents::de_rational"
        )]
        s: Rational,
        points: Vec<(f64, f64)>,
    },
    /// `φ_{4-N} v_ε` at each `ε`.
    Cutoff { epsilons: Vec<f64> },
}

impl SharpnessSweep {
    pub fn len(&self) -> usize {
        match self {
            SharpnessSweep::Mollified { points, .. } => points.len(),
            SharpnessSweep::Cutoff { epsilons } => epsilons.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessPoint {
    /// `[δ, R]` or `[ε]`.
    pub parameters: Vec<f64>,
    pub quotient: QuotientReport,
    /// `quotient / sharp constant`.
    pub ratio: f64,
    pub ratio_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessProbe {
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub sharp_constant: Rational,
    pub points: Vec<SharpnessPoint>,
    /// Every quotient is at most the previous one plus three combined
    /// standard errors.
    pub monotone: bool,
    /// No quotient is more than three standard errors below the constant.
    pub lower_bound_holds: bool,
}

impl SharpnessProbe {
    pub fn last(&self) -> Option<&SharpnessPoint> {
        self.points.last()
    }

    /// `|ratio - 1| ≤ band` at the last sweep point.
    pub fn final_within(&self, band: f64) -> bool {
        self.last().is_some_and(|p| (p.ratio - 1.0).abs() <= band)
    }
}

/// Rayleigh quotients against `V_n` along a sweep, compared with the sharp
/// constant `N²(N-4)²/n⁴`.
pub fn sharpness_probe(config: &PoleConfig, sweep: &SharpnessSweep, params: &McParams) -> Result<SharpnessProbe> {
    let n = config.len();
    let lambda = sharp_constant(config.dimension(), n, 2)?;
    let lambda_f = rational_to_f64(&lambda);
    let potential = PotentialSpec::new(PotentialKind::Vn, config)?;
    let trials: Vec<(Vec<f64>, TrialFunction<'_>)> = match sweep {
        SharpnessSweep::Mollified { s, points } => {
            if n < 3 {
                return Err(Error::Precondition(
                    "mollified sweeps need n >= 3; use the cut-off sweep for two poles".into(),
                ));
            }
            points
                .iter()
                .map(|&(delta, r)| Ok((vec![delta, r], TrialFunction::mollified(config, *s, r, delta)?)))
                .collect::<Result<_>>()?
        }
        SharpnessSweep::Cutoff { epsilons } => epsilons
            .iter()
            .map(|&eps| Ok((vec![eps], TrialFunction::cutoff(config, eps)?)))
            .collect::<Result<_>>()?,
    };
    let mut points = Vec::with_capacity(trials.len());
    for (parameters, trial) in &trials {
        let quotient = rayleigh_quotient(trial, &potential, 2, params)?;
        points.push(SharpnessPoint {
            parameters: parameters.clone(),
            ratio: quotient.quotient / lambda_f,
            ratio_std_error: quotient.std_error / lambda_f,
            quotient,
        });
    }
    let monotone = points.windows(2).all(|w| {
        let (a, b) = (&w[0].quotient, &w[1].quotient);
        b.quotient <= a.quotient + 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
    });
    let lower_bound_holds = points
        .iter()
        .all(|p| p.quotient.quotient >= lambda_f - 3.0 * p.quotient.std_error);
    Ok(SharpnessProbe {
        sharp_constant: lambda,
        points,
        monotone,
        lower_bound_holds,
    })
}

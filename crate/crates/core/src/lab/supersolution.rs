//! Pointwise supersolution check for the ground states `φ_s`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipole::{GroundState, PoleConfig, PotentialKind, PotentialSpec, RellichTerm};
use crate::Rational;

/// Relative tolerance on `Δ²φ - Wφ ≥ 0`, which holds with equality.
pub const SUPERSOLUTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupersolutionReport {
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub s: Rational,
    pub points: usize,
    /// `min_x -Δφ_s(x)/φ_s(x)`.
    pub min_minus_laplacian: f64,
    /// `min_x (Δ²φ_s - Wφ_s)/φ_s`; `None` when `s < 4-N`.
    pub min_fourth_order_slack: Option<f64>,
    /// `max_x |Δ²φ_s - Wφ_s| / max(|Δ²φ_s|, |Wφ_s|)`; `None` when `s < 4-N`.
    pub max_relative_defect: Option<f64>,
    pub laplacian_sign_holds: bool,
    /// `None` when `s < 4-N`, where the fourth-order family is not defined
    /// as a supersolution potential.
    pub fourth_order_sign_holds: Option<bool>,
}

impl SupersolutionReport {
    pub fn pass(&self) -> bool {
        self.laplacian_sign_holds && self.fourth_order_sign_holds.unwrap_or(true)
    }
}

/// Checks `-Δφ_s ≥ 0` and `Δ²φ_s - Wφ_s ≥ 0` at each point, with `W` the
/// full fourth-order family potential for `s`. Both are checked on the ratios
/// to `φ_s > 0`, which carry the same sign.
///
/// The Laplacian sign is checked for `2-N ≤ s < 0`, where its coefficient
/// `s(2-N-s)` is nonnegative; the fourth-order sign only for `4-N ≤ s < 0`.
pub fn supersolution_check(config: &PoleConfig, s: Rational, points: &[Vec<f64>]) -> Result<SupersolutionReport> {
    let dim = config.dimension() as i64;
    let lower = Rational::from_integer(2 - dim);
    if !(s >= lower && s < Rational::from_integer(0)) {
        return Err(Error::Precondition(format!("s = {s} must satisfy {lower} <= s < 0")));
    }
    let fourth_order = s >= Rational::from_integer(4 - dim);
    if !config.is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    if points.is_empty() {
        return Err(Error::InsufficientData { got: 0, required: 1 });
    }
    let gs = GroundState::new(config, s);
    let w = if fourth_order {
        Some(PotentialSpec::new(
            PotentialKind::RellichFamily {
                s,
                term: RellichTerm::Total,
            },
            config,
        )?)
    } else {
        None
    };
    let mut min_lap = f64::INFINITY;
    let mut min_slack = f64::INFINITY;
    let mut max_defect: f64 = 0.0;
    let mut fourth_ok = true;
    for x in points {
        let g = config.geometry(x)?;
        min_lap = min_lap.min(-gs.laplacian_ratio(&g));
        let Some(w) = &w else { continue };
        let bilap = gs.bilaplacian_ratio(&g)?;
        let pot = w.eval_geometry(&g);
        let slack = bilap - pot;
        let scale = bilap.abs().max(pot.abs()).max(f64::MIN_POSITIVE);
        min_slack = min_slack.min(slack);
        max_defect = max_defect.max(slack.abs() / scale);
        fourth_ok &= slack >= -SUPERSOLUTION_TOLERANCE * scale;
    }
    Ok(SupersolutionReport {
        s,
        points: points.len(),
        min_minus_laplacian: min_lap,
        min_fourth_order_slack: fourth_order.then_some(min_slack),
        max_relative_defect: fourth_order.then_some(max_defect),
        laplacian_sign_holds: min_lap >= 0.0,
        fourth_order_sign_holds: fourth_order.then_some(fourth_ok),
    })
}

//! Closed-form radial integrals used as quadrature oracles.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Surface area `ω = 2π^{N/2}/Γ(N/2)` of the unit sphere in `R^N`.
pub fn sphere_area(dimension: usize) -> f64 {
    let half = dimension as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Volume of the unit ball, `ω/N`.
pub fn unit_ball_volume(dimension: usize) -> f64 {
    sphere_area(dimension) / dimension as f64
}

/// `∫_{B_R} |x|^{-α} dx = ω R^{N-α}/(N-α)` for `α < N`.
pub fn radial_reference_integral(dimension: usize, alpha: f64, radius: f64) -> Result<f64> {
    let n = dimension as f64;
    if alpha >= n {
        return Err(Error::DivergentIntegral { alpha, dimension });
    }
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!("radius {radius} must be positive")));
    }
    Ok(sphere_area(dimension) * radius.powf(n - alpha) / (n - alpha))
}

/// `∫_{r_in<|x|<r_out} |x|^{-α} dx`, including the logarithmic case `α = N`.
pub fn radial_shell_integral(dimension: usize, alpha: f64, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::Precondition(format!(
            "need 0 < r_in < r_out, got ({r_in}, {r_out})"
        )));
    }
    let e = dimension as f64 - alpha;
    let radial = if e == 0.0 {
        (r_out / r_in).ln()
    } else {
        (r_out.powf(e) - r_in.powf(e)) / e
    };
    Ok(sphere_area(dimension) * radial)
}

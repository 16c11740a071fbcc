//! Finite-difference oracles for the Laplacian and bilaplacian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeOrder {
    Laplacian,
    Bilaplacian,
}

impl DerivativeOrder {
    /// Default step as a fraction of the distance to the nearest singularity.
    pub fn default_step_fraction(self) -> f64 {
        match self {
            DerivativeOrder::Laplacian => 1e-3,
            // Larger than the Laplacian step: the fourth difference divides
            // by h⁴, and the second extrapolation level keeps truncation
            // error below roundoff at this size.
            DerivativeOrder::Bilaplacian => 6e-2,
        }
    }
}

/// `Δf(x)` or `Δ²f(x)` by central differences with Richardson extrapolation:
/// one step `R(h) = (4·D(h/2) - D(h))/3` for the Laplacian, and a second
/// level `(16·R(h/2) - R(h))/15` for the bilaplacian.
///
/// `singularities` are points near which `f` is not smooth; the default step
/// is scaled by the distance to the nearest one, and a step larger than half
/// that distance is refused. With no singularities the scale is `max(1, |x|)`.
pub fn fd_derivative<F>(
    f: F,
    x: &[f64],
    order: DerivativeOrder,
    h: Option<f64>,
    singularities: &[Vec<f64>],
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let distance = singularities
        .iter()
        .map(|a| a.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    let scale = if distance.is_finite() {
        distance
    } else {
        x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0)
    };
    let h = h.unwrap_or(order.default_step_fraction() * scale);
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step {h} must be positive")));
    }
    // The widest stencil reaches 2h along an axis (bilaplacian) or h·√2 on a
    // diagonal; refuse anything that could touch the singularity.
    if distance.is_finite() && h > 0.5 * distance {
        return Err(Error::StepTooLarge { step: h, distance });
    }
    match order {
        DerivativeOrder::Laplacian => {
            let d = |h: f64| laplacian_stencil(&f, x, h);
            Ok((4.0 * d(0.5 * h) - d(h)) / 3.0)
        }
        DerivativeOrder::Bilaplacian => {
            let d = |h: f64| bilaplacian_stencil(&f, x, h);
            let (d1, d2, d4) = (d(h), d(0.5 * h), d(0.25 * h));
            let r1 = (4.0 * d2 - d1) / 3.0;
            let r2 = (4.0 * d4 - d2) / 3.0;
            Ok((16.0 * r2 - r1) / 15.0)
        }
    }
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

/// `Σ_k (f(x+he_k) - 2f(x) + f(x-he_k))/h²`, error `O(h²)`.
fn laplacian_stencil<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> f64 {
    let f0 = f(x);
    let mut acc = 0.0;
    for k in 0..x.len() {
        acc += f(&shifted(x, &[(k, h)])) - 2.0 * f0 + f(&shifted(x, &[(k, -h)]));
    }
    acc / (h * h)
}

/// `Σ_k ∂_k⁴f + 2Σ_{k<l} ∂_k²∂_l²f` with the five-point fourth-difference
/// stencil on each axis and the tensor product of second differences for the
/// mixed terms, error `O(h²)`.
fn bilaplacian_stencil<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> f64 {
    let dim = x.len();
    let f0 = f(x);
    let mut pure = 0.0;
    for k in 0..dim {
        pure += f(&shifted(x, &[(k, 2.0 * h)])) - 4.0 * f(&shifted(x, &[(k, h)])) + 6.0 * f0
            - 4.0 * f(&shifted(x, &[(k, -h)]))
            + f(&shifted(x, &[(k, -2.0 * h)]));
    }
    let c = [1.0, -2.0, 1.0];
    let mut mixed = 0.0;
    for k in 0..dim {
        for l in (k + 1)..dim {
            for (a, ca) in c.iter().enumerate() {
                for (b, cb) in c.iter().enumerate() {
                    let dk = (a as f64 - 1.0) * h;
                    let dl = (b as f64 - 1.0) * h;
                    mixed += ca * cb * f(&shifted(x, &[(k, dk), (l, dl)]));
                }
            }
        }
    }
    (pure + 2.0 * mixed) / h.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_sq(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn laplacian_of_quadratic() {
        let x = [0.3, -1.0, 2.0, 0.5, 0.1];
        let v = fd_derivative(norm_sq, &x, DerivativeOrder::Laplacian, None, &[]).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn bilaplacian_of_quartic() {
        let x = [0.6, 0.0, 0.8, 0.0, 0.0];
        let f = |y: &[f64]| norm_sq(y).powi(2);
        let v = fd_derivative(f, &x, DerivativeOrder::Bilaplacian, None, &[]).unwrap();
        assert!((v - 280.0).abs() < 1e-4 * 280.0, "{v}");
    }

    #[test]
    fn step_reaching_the_pole_is_refused() {
        let pole = vec![vec![0.0; 5]];
        let x = [0.1, 0.0, 0.0, 0.0, 0.0];
        let r = fd_derivative(norm_sq, &x, DerivativeOrder::Laplacian, Some(0.1), &pole);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
        assert!(fd_derivative(norm_sq, &x, DerivativeOrder::Laplacian, None, &pole).is_ok());
    }
}

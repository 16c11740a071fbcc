//! Numerical experiments on the inequalities and identities: finite
//! differences, identity residuals, Rayleigh quotients, supersolution checks
//! and sharpness sweeps.

mod fd;
mod identities;
mod rayleigh;
mod supersolution;
mod trial;

pub use fd::{fd_derivative, DerivativeOrder};
pub use identities::{
    check_hardy_identity, check_identity, check_rellich_identity, check_xi_zeta_identity, relative_residual,
    IdentityId, IdentityInput, ResidualReport, POINTWISE_TOLERANCE, RESIDUAL_FLOOR,
};
pub use rayleigh::{
    rayleigh_quotient, sharpness_probe, verify_inequality, InequalityReport, QuotientReport, SharpnessPoint,
    SharpnessProbe, SharpnessSweep,
};
pub use supersolution::{supersolution_check, SupersolutionReport, SUPERSOLUTION_TOLERANCE};
pub use trial::{Jet, TrialFunction, TrialKind};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::multipole::PoleConfig;

/// `count` points uniform in the ball of radius `max|a_i| + 2` about the
/// origin, each at least `min_distance` from every pole.
pub fn random_points(config: &PoleConfig, count: usize, min_distance: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = config.max_pole_norm() + 2.0;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = uniform_in_ball(&mut rng, config.dimension(), radius);
        let far = config
            .poles()
            .iter()
            .all(|a| a.iter().zip(&x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() >= min_distance * min_distance);
        if far {
            out.push(x);
        }
    }
    out
}

/// `count` bumps with centres uniform in the ball of radius `max|a_i| + 1`
/// and radii uniform in `[0.2, 1)`.
pub fn random_bumps(config: &PoleConfig, count: usize, seed: u64) -> Vec<TrialFunction<'_>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = config.max_pole_norm() + 1.0;
    (0..count)
        .map(|_| {
            let center = uniform_in_ball(&mut rng, config.dimension(), radius);
            let r = rng.random_range(0.2..1.0);
            TrialFunction::bump(config, center, r).expect("valid bump")
        })
        .collect()
}

fn uniform_in_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    g.into_iter().map(|v| v * r / norm).collect()
}

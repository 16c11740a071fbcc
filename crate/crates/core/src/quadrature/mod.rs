//! Monte-Carlo integration over `R^N` of integrands with power-law
//! singularities at the poles and power-law decay at infinity, plus exact
//! radial reference integrals.

mod integrate;
mod radial;
mod sampler;
mod stats;

pub use integrate::{
    annulus_integrate, annulus_integrate_paired, annulus_sampler, annulus_volume, mc_integrate, mc_integrate_paired,
    mc_integrate_with, McParams, PairedResult, QuadResult, DEFAULT_BATCH_SIZE, MIN_SAMPLES,
};
pub use radial::{radial_reference_integral, radial_shell_integral, sphere_area, unit_ball_volume};
pub use sampler::{build_sampler, Component, ImportanceSampler, RadialLaw, ResolvedSingularity, SamplerHints};
pub use stats::{MultiStats, RunningStats};

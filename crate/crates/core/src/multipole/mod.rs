//! Exact evaluation of multipolar power products, their Laplacian and
//! bilaplacian, the associated potentials and the sharp constants.

mod config;
mod ground_state;
mod potential;
mod tables;

pub use config::{regular_simplex, Geometry, PoleConfig, DEFAULT_EXCLUSION_RADIUS, MIN_DIMENSION};
pub use ground_state::{
    bilaplacian_phi_s, eval_power_product, laplacian_phi_s, GroundState, GroundStateJet, PowerProduct,
};
pub use potential::{potential_eval, PotentialKind, PotentialSpec, RellichTerm};
pub use tables::{
    bilaplacian_coefficients, hardy_coefficients, pairs, rellich_coefficients, sharp_constant, xi_zeta_factor, DiagOff,
    ExponentTables, RellichTables,
};

/// Exponent tables for `(config, s)`; fails for `s ∈ {2, 4}`.
pub fn exponent_tables(config: &PoleConfig, s: crate::Rational) -> crate::Result<ExponentTables> {
    ExponentTables::new(config, s)
}

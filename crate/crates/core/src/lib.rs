//! Numerical laboratory for sharp multipolar Hardy and Rellich inequalities.
//!
//! The crate is organised bottom-up:
//!
//! * [`multipole`] evaluates the ground states `φ_s = ∏|x-a_i|^{sα_i}`, their
//!   closed-form Laplacian and bilaplacian, and the multipolar potentials;
//! * [`exponents`] does exact power-law bookkeeping for integrability;
//! * [`quadrature`] integrates singular integrands over `R^N` by importance
//!   sampling with reproducible batch statistics;
//! * [`lab`] turns the inequalities and identities into experiments;
//! * [`criticality`] runs the logarithmic cut-off experiment for two poles.

pub mod criticality;
pub mod error;
pub mod exponents;
pub mod lab;
pub mod multipole;
pub mod quadrature;

pub use error::{Error, Result};

/// Exact rational used for weights, exponents and coefficient tables.
pub type Rational = num_rational::Rational64;

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

//! Multipolar potentials: the classical `W₁`, `W₂`, the fourth-order `V_n`,
//! and the one-parameter families produced by the ground states `φ_s`.

use serde::{Deserialize, Serialize};

use super::config::{Geometry, PoleConfig};
use super::tables::{hardy_coefficients, inverse_squares, pairs, rellich_coefficients, RellichTables};
use crate::error::{Error, Result};
use crate::{rational_to_f64, Rational};

/// Which of the three terms of the fourth-order family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RellichTerm {
    Mu,
    Sigma,
    Nu,
    /// Sum of all three terms, i.e. `Δ²φ_s/φ_s` for uniform weights.
    Total,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `Σ_i 1/|x-a_i|²`
    W1,
    /// `Σ_{i<j} |a_i-a_j|²/(|x-a_i|²|x-a_j|²)`
    W2,
    /// The fourth-order potential with `ν` evaluated at `s = 4-N`, without
    /// the sharp constant.
    Vn,
    /// `-Δφ_s/φ_s` for the configuration's weights.
    HardyFamily { s: Rational },
    /// One term (or the total) of `Δ²φ_s/φ_s` for uniform weights, written
    /// with the `μ`, `σ`, `ν` tables.
    RellichFamily { s: Rational, term: RellichTerm },
    /// `Σ c_k V_k`.
    Combination(Vec<(Rational, PotentialKind)>),
}

impl PotentialKind {
    /// Worst local exponent of the potential at a pole (`-2` for first-order
    /// kinds, `-4` for fourth-order kinds).
    pub fn pole_order(&self) -> i64 {
        match self {
            PotentialKind::W1 | PotentialKind::W2 | PotentialKind::HardyFamily { .. } => -2,
            PotentialKind::Vn | PotentialKind::RellichFamily { .. } => -4,
            PotentialKind::Combination(parts) => parts.iter().map(|(_, k)| k.pole_order()).min().unwrap_or(0),
        }
    }
}

/// A potential bound to a configuration, with its coefficient tables resolved.
#[derive(Debug, Clone)]
pub struct PotentialSpec<'a> {
    kind: PotentialKind,
    config: &'a PoleConfig,
    eval: Evaluator,
}

#[derive(Debug, Clone)]
enum Evaluator {
    W1,
    W2,
    Hardy {
        single: f64,
        pair: f64,
    },
    Rellich {
        coef: [f64; 3],
        mu: [f64; 2],
        sigma: [f64; 2],
        nu: [f64; 2],
    },
    Combination(Vec<(f64, Evaluator)>),
}

impl<'a> PotentialSpec<'a> {
    pub fn new(kind: PotentialKind, config: &'a PoleConfig) -> Result<Self> {
        let eval = build(&kind, config)?;
        Ok(Self { kind, config, eval })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn config(&self) -> &'a PoleConfig {
        self.config
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let g = self.config.geometry(x)?;
        Ok(self.eval_geometry(&g))
    }

    pub fn eval_geometry(&self, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        evaluate(&self.eval, self.config, &inv)
    }
}

/// Evaluates `spec` at `x`.
pub fn potential_eval(spec: &PotentialSpec<'_>, x: &[f64]) -> Result<f64> {
    spec.eval(x)
}

fn build(kind: &PotentialKind, config: &PoleConfig) -> Result<Evaluator> {
    let f = rational_to_f64;
    Ok(match kind {
        PotentialKind::W1 => Evaluator::W1,
        PotentialKind::W2 => Evaluator::W2,
        PotentialKind::HardyFamily { s } => {
            let [single, pair] = hardy_coefficients(config.dimension(), *s);
            Evaluator::Hardy {
                single: f(&single),
                pair: f(&pair),
            }
        }
        PotentialKind::Vn => {
            let s = Rational::from_integer(4 - config.dimension() as i64);
            let nu = RellichTables::new(config.len(), s)?.nu;
            Evaluator::Rellich {
                coef: [0.0, 0.0, 1.0],
                mu: [0.0; 2],
                sigma: [0.0; 2],
                nu: [f(&nu.diagonal), f(&nu.off)],
            }
        }
        PotentialKind::RellichFamily { s, term } => {
            if !config.is_uniform() {
                return Err(Error::NonUniformWeights);
            }
            let t = RellichTables::new(config.len(), *s)?;
            let all = rellich_coefficients(config.dimension(), config.len(), *s).map(|c| f(&c));
            let coef = match term {
                RellichTerm::Mu => [all[0], 0.0, 0.0],
                RellichTerm::Sigma => [0.0, all[1], 0.0],
                RellichTerm::Nu => [0.0, 0.0, all[2]],
                RellichTerm::Total => all,
            };
            Evaluator::Rellich {
                coef,
                mu: [f(&t.mu.diagonal), f(&t.mu.off)],
                sigma: [f(&t.sigma.diagonal), f(&t.sigma.off)],
                nu: [f(&t.nu.diagonal), f(&t.nu.off)],
            }
        }
        PotentialKind::Combination(parts) => Evaluator::Combination(
            parts
                .iter()
                .map(|(c, k)| Ok((f(c), build(k, config)?)))
                .collect::<Result<_>>()?,
        ),
    })
}

fn evaluate(e: &Evaluator, config: &PoleConfig, inv: &[f64]) -> f64 {
    let n = config.len();
    let pair_term = |i: usize, j: usize| config.separation_sq(i, j) * inv[i] * inv[j];
    match e {
        Evaluator::W1 => inv.iter().sum(),
        Evaluator::W2 => pairs(n).into_iter().map(|(i, j)| pair_term(i, j)).sum(),
        Evaluator::Hardy { single, pair } => {
            let alpha = config.weights_f64();
            let s1: f64 = alpha.iter().zip(inv).map(|(a, v)| a * v).sum();
            let s2: f64 = pairs(n)
                .into_iter()
                .map(|(i, j)| alpha[i] * alpha[j] * pair_term(i, j))
                .sum();
            single * s1 + pair * s2
        }
        Evaluator::Rellich { coef, mu, sigma, nu } => {
            let pick = |t: &[f64; 2], diag: bool| if diag { t[0] } else { t[1] };
            let all_pairs = pairs(n);
            let mut total = 0.0;
            if coef[0] != 0.0 {
                let mut acc = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        acc += pick(mu, k == i) * inv[i] * inv[k];
                    }
                }
                total += coef[0] * acc;
            }
            if coef[1] != 0.0 || coef[2] != 0.0 {
                for &(i, j) in &all_pairs {
                    let outer = pair_term(i, j);
                    if coef[1] != 0.0 {
                        let inner: f64 = (0..n).map(|k| pick(sigma, k == i || k == j) * inv[k]).sum();
                        total += coef[1] * outer * inner;
                    }
                    if coef[2] != 0.0 {
                        let inner: f64 = all_pairs
                            .iter()
                            .map(|&(k, l)| pick(nu, k == i || k == j) * pick(nu, l == i || l == j) * pair_term(k, l))
                            .sum();
                        total += coef[2] * outer * inner;
                    }
                }
            }
            total
        }
        Evaluator::Combination(parts) => parts.iter().map(|(c, e)| c * evaluate(e, config, inv)).sum(),
    }
}

//! Exact rational coefficient tables for the multipolar ground states.
//!
//! `ξ` and `ζ` are the exponent tables obtained by rewriting each term of
//! `Δφ_s` as a new product of distance powers; `μ`, `σ`, `ν` are the
//! uniform-weight specialisations that appear in the fourth-order potential.

use num_traits::{One, Zero};

use super::config::{Geometry, PoleConfig};
use crate::error::{Error, Result};
use crate::{rational_to_f64, Rational};

/// Index pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

fn check_s(s: Rational) -> Result<()> {
    if s == int(2) || s == int(4) {
        return Err(Error::DegenerateS(s.to_string()));
    }
    Ok(())
}

/// The tables `ξ_{k,i}` and `ζ_{k,i,j}` for a configuration and exponent `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTables {
    s: Rational,
    n: usize,
    /// `xi[k][i]`
    xi: Vec<Vec<Rational>>,
    /// `zeta[p][k]` for the `p`-th pair of [`pairs`].
    zeta: Vec<Vec<Rational>>,
    pairs: Vec<(usize, usize)>,
    xi_f: Vec<f64>,
    zeta_f: Vec<f64>,
    alpha_f: Vec<f64>,
}

impl ExponentTables {
    pub fn new(config: &PoleConfig, s: Rational) -> Result<Self> {
        check_s(s)?;
        let n = config.len();
        let alpha = config.weights();
        let xi: Vec<Vec<Rational>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        let shift = if k == i { int(2) } else { Rational::zero() };
                        (s * alpha[k] - shift) / (s - int(2))
                    })
                    .collect()
            })
            .collect();
        let pairs = pairs(n);
        let zeta: Vec<Vec<Rational>> = pairs
            .iter()
            .map(|&(i, j)| {
                (0..n)
                    .map(|k| {
                        let shift = if k == i || k == j { int(2) } else { Rational::zero() };
                        (s * alpha[k] - shift) / (s - int(4))
                    })
                    .collect()
            })
            .collect();
        let xi_f = xi.iter().flatten().map(rational_to_f64).collect();
        let zeta_f = zeta.iter().flatten().map(rational_to_f64).collect();
        Ok(Self {
            s,
            n,
            xi,
            zeta,
            pairs,
            xi_f,
            zeta_f,
            alpha_f: config.weights_f64().to_vec(),
        })
    }

    pub fn s(&self) -> Rational {
        self.s
    }

    pub fn xi(&self, k: usize, i: usize) -> Rational {
        self.xi[k][i]
    }

    /// `ζ_{k,i,j}`; the pair may be given in either order.
    pub fn zeta(&self, k: usize, i: usize, j: usize) -> Rational {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let p = self.pair_index(a, b);
        self.zeta[p][k]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        // Row-major offset of (i, j) among the pairs with i < j.
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Exact column sums `Σ_k ξ_{k,i}`.
    pub fn xi_column_sums(&self) -> Vec<Rational> {
        (0..self.n).map(|i| (0..self.n).map(|k| self.xi[k][i]).sum()).collect()
    }

    /// Exact slice sums `Σ_k ζ_{k,i,j}`, one per pair.
    pub fn zeta_slice_sums(&self) -> Vec<Rational> {
        self.zeta.iter().map(|col| col.iter().sum()).collect()
    }

    #[inline]
    fn xi_f(&self, k: usize, i: usize) -> f64 {
        self.xi_f[k * self.n + i]
    }

    #[inline]
    fn zeta_f(&self, p: usize, k: usize) -> f64 {
        self.zeta_f[p * self.n + k]
    }

    /// `Σ_i α_i/|x-a_i|² · Σ_k ξ_{k,i}/|x-a_k|²`
    pub fn xi_single_sum(&self, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        (0..self.n)
            .map(|i| {
                let inner: f64 = (0..self.n).map(|k| self.xi_f(k, i) * inv[k]).sum();
                self.alpha_f[i] * inv[i] * inner
            })
            .sum()
    }

    /// `Σ_i α_i/|x-a_i|² · Σ_{k<l} ξ_{k,i} ξ_{l,i} |a_k-a_l|²/(|x-a_k|²|x-a_l|²)`
    pub fn xi_double_sum(&self, config: &PoleConfig, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        (0..self.n)
            .map(|i| {
                let inner: f64 = self
                    .pairs
                    .iter()
                    .map(|&(k, l)| self.xi_f(k, i) * self.xi_f(l, i) * config.separation_sq(k, l) * inv[k] * inv[l])
                    .sum();
                self.alpha_f[i] * inv[i] * inner
            })
            .sum()
    }

    /// `Σ_{i<j} α_iα_j|a_i-a_j|²/(|x-a_i|²|x-a_j|²) · Σ_k ζ_{k,i,j}/|x-a_k|²`
    pub fn zeta_single_sum(&self, config: &PoleConfig, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        self.pairs
            .iter()
            .enumerate()
            .map(|(p, &(i, j))| {
                let inner: f64 = (0..self.n).map(|k| self.zeta_f(p, k) * inv[k]).sum();
                self.pair_weight(config, &inv, i, j) * inner
            })
            .sum()
    }

    /// `Σ_{i<j} α_iα_j|a_i-a_j|²/(|x-a_i|²|x-a_j|²) · Σ_{k<l} ζ_{k,i,j}ζ_{l,i,j}|a_k-a_l|²/(|x-a_k|²|x-a_l|²)`
    pub fn zeta_double_sum(&self, config: &PoleConfig, g: &Geometry) -> f64 {
        let inv = inverse_squares(g);
        self.pairs
            .iter()
            .enumerate()
            .map(|(p, &(i, j))| {
                let inner: f64 = self
                    .pairs
                    .iter()
                    .map(|&(k, l)| self.zeta_f(p, k) * self.zeta_f(p, l) * config.separation_sq(k, l) * inv[k] * inv[l])
                    .sum();
                self.pair_weight(config, &inv, i, j) * inner
            })
            .sum()
    }

    #[inline]
    fn pair_weight(&self, config: &PoleConfig, inv: &[f64], i: usize, j: usize) -> f64 {
        self.alpha_f[i] * self.alpha_f[j] * config.separation_sq(i, j) * inv[i] * inv[j]
    }
}

pub(crate) fn inverse_squares(g: &Geometry) -> Vec<f64> {
    g.dist_sq_all().iter().map(|d| 1.0 / d).collect()
}

/// Coefficients `[A, B, C]` of the three-term closed form
/// `Δ²φ_s/φ_s = A·(ξ single sum) + B·(ζ single sum) + C·(ζ double sum)`:
/// `A = s(N+s-2)(s-2)(N+s-4)`, `B = 2s²(s-4)(4-N-s)`, `C = s²(s-4)²`.
pub fn bilaplacian_coefficients(dimension: usize, s: Rational) -> [Rational; 3] {
    let n = int(dimension as i64);
    let a = s * (n + s - int(2)) * (s - int(2)) * (n + s - int(4));
    let b = int(2) * s * s * (s - int(4)) * (int(4) - n - s);
    let c = s * s * (s - int(4)) * (s - int(4));
    [a, b, c]
}

/// Proportionality factor `s(s-4)/(s-2)²` linking the ξ double sum to the ζ
/// single sum.
pub fn xi_zeta_factor(s: Rational) -> Result<Rational> {
    check_s(s)?;
    Ok(s * (s - int(4)) / ((s - int(2)) * (s - int(2))))
}

/// Coefficients of the first-order family `-Δφ_s/φ_s`:
/// `s(2-N-s)` on `Σ α_i/|x-a_i|²` and `s²` on the pair sum.
///
/// The first coefficient vanishes at `s = 2-N`, recovering the pure pair
/// potential.
pub fn hardy_coefficients(dimension: usize, s: Rational) -> [Rational; 2] {
    let n = int(dimension as i64);
    [s * (int(2) - n - s), s * s]
}

/// Scalar prefactors of the uniform-weight fourth-order potential:
/// `s(s-2)(2-N-s)(4-N-s)/n²`, `2s³(4-N-s)/n³`, `s²(s-4)²/n⁴`.
pub fn rellich_coefficients(dimension: usize, poles: usize, s: Rational) -> [Rational; 3] {
    let big_n = int(dimension as i64);
    let n = int(poles as i64);
    let first = s * (s - int(2)) * (int(2) - big_n - s) * (int(4) - big_n - s) / (n * n);
    let second = int(2) * s * s * s * (int(4) - big_n - s) / (n * n * n);
    let third = s * s * (s - int(4)) * (s - int(4)) / (n * n * n * n);
    [first, second, third]
}

/// Uniform-weight tables `μ_{k,i}`, `σ_{k,i,j}`, `ν_{k,i,j}`.
///
/// Each table has a "diagonal" value (taken when `k` is one of the row
/// indices) and an "off-diagonal" value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RellichTables {
    pub s: Rational,
    pub mu: DiagOff,
    pub sigma: DiagOff,
    pub nu: DiagOff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagOff {
    pub diagonal: Rational,
    pub off: Rational,
}

impl DiagOff {
    pub fn pick(&self, on_diagonal: bool) -> Rational {
        if on_diagonal {
            self.diagonal
        } else {
            self.off
        }
    }
}

impl RellichTables {
    /// Requires `s ∉ {0, 2, 4}` (σ divides by `s`).
    pub fn new(poles: usize, s: Rational) -> Result<Self> {
        check_s(s)?;
        if s.is_zero() {
            return Err(Error::DegenerateS(s.to_string()));
        }
        let two_n = int(2 * poles as i64);
        Ok(Self {
            s,
            mu: DiagOff {
                diagonal: (s - two_n) / (s - int(2)),
                off: s / (s - int(2)),
            },
            sigma: DiagOff {
                diagonal: (s - two_n) / s,
                off: Rational::one(),
            },
            nu: DiagOff {
                diagonal: (s - two_n) / (s - int(4)),
                off: s / (s - int(4)),
            },
        })
    }
}

/// The sharp constant: `N²(N-4)²/n⁴` for order 2, `(N-2)²/n²` for order 1.
pub fn sharp_constant(dimension: usize, poles: usize, order: u8) -> Result<Rational> {
    let required = match order {
        1 => 3,
        2 => 5,
        _ => return Err(Error::Precondition(format!("order must be 1 or 2, got {order}"))),
    };
    if dimension < required {
        return Err(Error::DimensionTooSmall { dimension, required });
    }
    if poles < 2 {
        return Err(Error::TooFewPoles {
            got: poles,
            required: 2,
        });
    }
    let big_n = int(dimension as i64);
    let n = int(poles as i64);
    Ok(match order {
        1 => (big_n - int(2)) * (big_n - int(2)) / (n * n),
        _ => big_n * big_n * (big_n - int(4)) * (big_n - int(4)) / (n * n * n * n),
    })
}

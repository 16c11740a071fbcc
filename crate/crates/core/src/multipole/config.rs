use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::Rational;

/// Default radius around each pole inside which point evaluations are refused.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-12;

/// Smallest dimension for which the fourth-order theory applies.
pub const MIN_DIMENSION: usize = 5;

/// Dimension, pole positions and convex weights of a multipolar configuration.
///
/// Immutable after construction; all evaluators borrow it read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleConfig {
    dimension: usize,
    poles: Vec<Vec<f64>>,
    weights: Vec<Rational>,
    weights_f64: Vec<f64>,
    separations_sq: Vec<f64>,
    exclusion_radius: f64,
}

impl PoleConfig {
    /// Validates and builds a configuration. Weights default to `1/n`.
    pub fn new(dimension: usize, poles: Vec<Vec<f64>>, weights: Option<Vec<Rational>>) -> Result<Self> {
        if dimension < MIN_DIMENSION {
            return Err(Error::DimensionTooSmall {
                dimension,
                required: MIN_DIMENSION,
            });
        }
        if poles.is_empty() {
            return Err(Error::TooFewPoles { got: 0, required: 1 });
        }
        for p in &poles {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::Precondition("pole coordinates must be finite".into()));
            }
        }
        let n = poles.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if squared_distance(&poles[i], &poles[j]) == 0.0 {
                    return Err(Error::DuplicatePoles { first: i, second: j });
                }
            }
        }

        let weights = match weights {
            None => vec![Rational::new(1, n as i64); n],
            Some(w) => {
                if w.len() != n {
                    return Err(Error::BadWeights(format!("{} weights for {} poles", w.len(), n)));
                }
                if let Some(bad) = w.iter().find(|a| a.is_negative() || **a > Rational::one()) {
                    return Err(Error::BadWeights(format!("weight {bad} outside [0, 1]")));
                }
                let total: Rational = w.iter().sum();
                if total != Rational::one() {
                    return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
                }
                w
            }
        };
        let weights_f64 = weights.iter().map(crate::rational_to_f64).collect();

        let mut separations_sq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                separations_sq[i * n + j] = squared_distance(&poles[i], &poles[j]);
            }
        }

        Ok(Self {
            dimension,
            poles,
            weights,
            weights_f64,
            separations_sq,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        })
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of poles `n`.
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn poles(&self) -> &[Vec<f64>] {
        &self.poles
    }

    pub fn pole(&self, i: usize) -> &[f64] {
        &self.poles[i]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weights_f64(&self) -> &[f64] {
        &self.weights_f64
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    pub fn is_uniform(&self) -> bool {
        let u = Rational::new(1, self.len() as i64);
        self.weights.iter().all(|w| *w == u)
    }

    /// `|a_i - a_j|^2`.
    #[inline]
    pub fn separation_sq(&self, i: usize, j: usize) -> f64 {
        self.separations_sq[i * self.len() + j]
    }

    /// Minimum pairwise pole distance, or `None` for a single pole.
    pub fn min_separation(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.separation_sq(i, j).sqrt())
            .min_by(f64::total_cmp)
    }

    /// Largest pole norm `max |a_i|`.
    pub fn max_pole_norm(&self) -> f64 {
        self.poles.iter().map(|p| norm(p)).fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dimension];
        for p in &self.poles {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    }

    /// Distance from `x` to the nearest pole together with that pole's index.
    pub fn nearest_pole(&self, x: &[f64]) -> (usize, f64) {
        self.poles
            .iter()
            .enumerate()
            .map(|(i, p)| (i, squared_distance(x, p).sqrt()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("configuration has at least one pole")
    }

    /// Per-pole offsets `x - a_i` and squared distances, refusing points inside
    /// the exclusion radius.
    pub fn geometry(&self, x: &[f64]) -> Result<Geometry> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        let n = self.len();
        let d = self.dimension;
        let mut offsets = Vec::with_capacity(n * d);
        let mut dist_sq = Vec::with_capacity(n);
        for (i, p) in self.poles.iter().enumerate() {
            let mut r2 = 0.0;
            for (xk, pk) in x.iter().zip(p) {
                let o = xk - pk;
                offsets.push(o);
                r2 += o * o;
            }
            let r = r2.sqrt();
            if r <= self.exclusion_radius {
                return Err(Error::EvalAtPole { pole: i, distance: r });
            }
            dist_sq.push(r2);
        }
        Ok(Geometry {
            dimension: d,
            offsets,
            dist_sq,
        })
    }

    /// Same configuration with every pole shifted by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        let poles = self
            .poles
            .iter()
            .map(|p| p.iter().zip(shift).map(|(a, b)| a + b).collect())
            .collect();
        Ok(Self::new(self.dimension, poles, Some(self.weights.clone()))?.with_exclusion_radius(self.exclusion_radius))
    }

    /// Same configuration with every pole multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let poles = self
            .poles
            .iter()
            .map(|p| p.iter().map(|a| a * factor).collect())
            .collect();
        Ok(Self::new(self.dimension, poles, Some(self.weights.clone()))?.with_exclusion_radius(self.exclusion_radius))
    }
}

/// Offsets and squared distances of one evaluation point to every pole.
#[derive(Debug, Clone)]
pub struct Geometry {
    dimension: usize,
    offsets: Vec<f64>,
    dist_sq: Vec<f64>,
}

impl Geometry {
    #[inline]
    pub fn offset(&self, i: usize) -> &[f64] {
        &self.offsets[i * self.dimension..(i + 1) * self.dimension]
    }

    #[inline]
    pub fn dist_sq(&self, i: usize) -> f64 {
        self.dist_sq[i]
    }

    pub fn dist_sq_all(&self) -> &[f64] {
        &self.dist_sq
    }
}

/// Regular simplex of `n` poles with unit pairwise distance, centred at the
/// origin and embedded in the first `n - 1` coordinates of `R^dimension`.
pub fn regular_simplex(n: usize, dimension: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::TooFewPoles { got: 0, required: 1 });
    }
    if n - 1 > dimension {
        return Err(Error::Precondition(format!(
            "a regular simplex with {n} vertices needs dimension >= {}",
            n - 1
        )));
    }
    // Vertex i is e_i / sqrt(2) in R^n; project onto the Helmert basis of the
    // sum-zero hyperplane to land in R^(n-1).
    let mut poles = vec![vec![0.0; dimension]; n];
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for (i, pole) in poles.iter_mut().enumerate() {
            let component = match i.cmp(&k) {
                std::cmp::Ordering::Less => 1.0,
                std::cmp::Ordering::Equal => -(k as f64),
                std::cmp::Ordering::Greater => 0.0,
            };
            pole[k - 1] = component / norm / std::f64::consts::SQRT_2;
        }
    }
    Ok(poles)
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

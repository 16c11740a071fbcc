//! Batch-parallel importance-sampling integration.
//!
//! Sample `k` of batch `b` is drawn from `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `b`, every batch accumulates its own streaming moments, and batch
//! results are merged in batch order. The estimate therefore depends only on
//! `(seed, samples, batch_size)`, never on how rayon schedules the batches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::radial::sphere_area;
use super::sampler::{Component, ImportanceSampler, RadialLaw};
use super::stats::MultiStats;
use crate::error::{Error, Result};

pub const DEFAULT_BATCH_SIZE: u64 = 4096;
pub const MIN_SAMPLES: u64 = 1000;

/// Sample budget and seed of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl McParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Self {
        self.batch_size = batch_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InsufficientData {
                got: self.samples as usize,
                required: MIN_SAMPLES as usize,
            });
        }
        if self.batch_size == 0 {
            return Err(Error::Precondition("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Samples that fell inside a pole-exclusion ball and contributed 0.
    pub excluded: u64,
}

impl QuadResult {
    /// `|estimate - target| ≤ k·std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error
    }
}

/// Estimates of several integrals computed from one shared sample stream,
/// with the covariance of the estimates (for paired comparisons).
#[derive(Debug, Clone, PartialEq)]
pub struct PairedResult {
    pub stats: MultiStats,
    pub samples: u64,
    pub seed: u64,
    pub excluded: u64,
}

impl PairedResult {
    pub fn width(&self) -> usize {
        self.stats.width()
    }

    pub fn estimate(&self, i: usize) -> f64 {
        self.stats.mean()[i]
    }

    pub fn std_error(&self, i: usize) -> f64 {
        self.stats.std_error(i)
    }

    /// Covariance of the estimates `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.stats.mean_covariance(i, j)
    }

    pub fn result(&self, i: usize) -> QuadResult {
        QuadResult {
            estimate: self.estimate(i),
            std_error: self.std_error(i),
            samples: self.samples,
            seed: self.seed,
            excluded: self.excluded,
        }
    }

    /// Standard error of `estimate(i) - estimate(j)`.
    pub fn difference_std_error(&self, i: usize, j: usize) -> f64 {
        (self.covariance(i, i) + self.covariance(j, j) - 2.0 * self.covariance(i, j))
            .max(0.0)
            .sqrt()
    }

    /// Ratio `estimate(i)/estimate(j)` and its delta-method standard error.
    pub fn ratio(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let a = self.estimate(i);
        let b = self.estimate(j);
        let sb = self.std_error(j);
        if b == 0.0 || b.abs() <= 3.0 * sb {
            return Err(Error::DegenerateDenominator {
                estimate: b,
                std_error: sb,
            });
        }
        let r = a / b;
        let var = (self.covariance(i, i) - 2.0 * r * self.covariance(i, j) + r * r * self.covariance(j, j)) / (b * b);
        Ok((r, var.max(0.0).sqrt()))
    }
}

/// `∫_{R^N} f` by importance sampling from `sampler`.
pub fn mc_integrate<F>(f: F, sampler: &ImportanceSampler, samples: u64, seed: u64) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    mc_integrate_with(f, sampler, &McParams::new(samples, seed))
}

pub fn mc_integrate_with<F>(f: F, sampler: &ImportanceSampler, params: &McParams) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let paired = mc_integrate_paired(
        1,
        |x, out| {
            out[0] = f(x);
            Ok(())
        },
        sampler,
        params,
    )?;
    Ok(paired.result(0))
}

/// Integrates the `width` components written by `f` into its output slice,
/// all from the same samples.
pub fn mc_integrate_paired<F>(
    width: usize,
    f: F,
    sampler: &ImportanceSampler,
    params: &McParams,
) -> Result<PairedResult>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    params.validate()?;
    let dim = sampler.dimension();
    let batches = params.samples.div_ceil(params.batch_size);
    let run = |b: u64| -> Result<(MultiStats, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(b);
        let count = params.batch_size.min(params.samples - b * params.batch_size);
        let mut stats = MultiStats::new(width);
        let mut x = vec![0.0; dim];
        let mut vals = vec![0.0; width];
        let zeros = vec![0.0; width];
        let mut excluded = 0;
        for _ in 0..count {
            sampler.sample(&mut rng, &mut x);
            if sampler.is_excluded(&x) {
                excluded += 1;
                stats.push(&zeros);
                continue;
            }
            vals.iter_mut().for_each(|v| *v = 0.0);
            f(&x, &mut vals)?;
            if vals.iter().all(|v| *v == 0.0) {
                stats.push(&zeros);
                continue;
            }
            let q = sampler.density(&x);
            for v in vals.iter_mut() {
                *v /= q;
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::NaNEncountered { point: x });
            }
            stats.push(&vals);
        }
        Ok((stats, excluded))
    };
    let per_batch: Vec<Result<(MultiStats, u64)>> = (0..batches).into_par_iter().map(run).collect();
    let mut stats = MultiStats::new(width);
    let mut excluded = 0;
    for r in per_batch {
        let (s, e) = r?;
        stats.merge(&s);
        excluded += e;
    }
    Ok(PairedResult {
        stats,
        samples: params.samples,
        seed: params.seed,
        excluded,
    })
}

/// Sampler for the annulus `r_in < |x-c| < r_out` with `log|x-c|` uniform.
pub fn annulus_sampler(center: &[f64], r_in: f64, r_out: f64) -> Result<ImportanceSampler> {
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::Precondition(format!(
            "annulus needs 0 < r_in < r_out, got ({r_in}, {r_out})"
        )));
    }
    ImportanceSampler::new(
        center.len(),
        vec![Component {
            weight: 1.0,
            center: center.to_vec(),
            law: RadialLaw::LogShell {
                inner_radius: r_in,
                outer_radius: r_out,
            },
            resolves: None,
        }],
    )
}

/// `∫_{r_in<|x-c|<r_out} f` with log-uniform radii; exact for radial
/// integrands `∝ |x-c|^{-N}` up to the direction average.
pub fn annulus_integrate<F>(f: F, center: &[f64], r_in: f64, r_out: f64, samples: u64, seed: u64) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let sampler = annulus_sampler(center, r_in, r_out)?;
    mc_integrate(f, &sampler, samples, seed)
}

/// Paired version of [`annulus_integrate`].
pub fn annulus_integrate_paired<F>(
    width: usize,
    f: F,
    center: &[f64],
    r_in: f64,
    r_out: f64,
    params: &McParams,
) -> Result<PairedResult>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    let sampler = annulus_sampler(center, r_in, r_out)?;
    mc_integrate_paired(width, f, &sampler, params)
}

/// The annulus volume, handy for sanity checks.
pub fn annulus_volume(dimension: usize, r_in: f64, r_out: f64) -> f64 {
    let n = dimension as f64;
    sphere_area(dimension) * (r_out.powf(n) - r_in.powf(n)) / n
}

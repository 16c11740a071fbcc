/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// the pairwise update of Chan et al.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / total as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Vector-valued streaming mean and co-moment matrix, mergeable like
/// [`RunningStats`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStats {
    count: u64,
    mean: Vec<f64>,
    comoment: Vec<f64>,
}

impl MultiStats {
    pub fn new(width: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; width],
            comoment: vec![0.0; width * width],
        }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        let k = self.width();
        debug_assert_eq!(x.len(), k);
        self.count += 1;
        let inv = 1.0 / self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d * inv;
        }
        for i in 0..k {
            let after_i = x[i] - self.mean[i];
            for j in 0..k {
                self.comoment[i * k + j] += delta[j] * after_i;
            }
        }
    }

    pub fn merge(&mut self, other: &MultiStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let k = self.width();
        let total = self.count + other.count;
        let w = other.count as f64 / total as f64;
        let cross = self.count as f64 * w;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..k {
            self.mean[i] += delta[i] * w;
            for j in 0..k {
                self.comoment[i * k + j] += other.comoment[i * k + j] + delta[i] * delta[j] * cross;
            }
        }
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample covariance between components `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.comoment[i * self.width() + j] / (self.count - 1) as f64
        }
    }

    /// Covariance of the sample means of components `i` and `j`.
    pub fn mean_covariance(&self, i: usize, j: usize) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.covariance(i, j) / self.count as f64
        }
    }

    pub fn std_error(&self, i: usize) -> f64 {
        self.mean_covariance(i, i).max(0.0).sqrt()
    }

    /// Scalar statistics of component `i`.
    pub fn component(&self, i: usize) -> RunningStats {
        RunningStats {
            count: self.count,
            mean: self.mean[i],
            m2: self.comoment[i * self.width() + i],
        }
    }
}

use crate::error::{Error, Result};

/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self, seed: u64) -> Estimate {
        Estimate {
            mean: self.mean,
            stderr: (self.variance() / self.count.max(1) as f64).sqrt(),
            count: self.count,
            seed,
        }
    }
}

impl Extend<f64> for Accumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        acc.extend(iter);
        acc
    }
}

/// Sample mean with its standard error `sd / sqrt(count)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
    pub seed: u64,
}

impl Estimate {
    /// A deterministic value, stderr 0.
    pub fn exact(value: f64, seed: u64) -> Self {
        Estimate { mean: value, stderr: 0.0, count: 1, seed }
    }

    /// `(mean - exact) / stderr`; infinite when the stderr vanishes and the
    /// mean is off, 0 when both agree exactly.
    pub fn z(&self, exact: f64) -> f64 {
        let diff = self.mean - exact;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    /// `(a - b) / sqrt(se_a^2 + se_b^2)`.
    pub fn z_between(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = self.mean - other.mean;
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    fn to_accumulator(self) -> Accumulator {
        let var = self.stderr * self.stderr * self.count as f64;
        Accumulator {
            count: self.count,
            mean: self.mean,
            m2: var * self.count.saturating_sub(1) as f64,
        }
    }
}

/// Pools independent estimates as if their samples had been accumulated in
/// a single pass.
pub fn merge_estimates(parts: &[Estimate]) -> Result<Estimate> {
    let first = parts.first().ok_or_else(|| Error::domain("cannot merge an empty list of estimates"))?;
    if parts.len() == 1 {
        return Ok(*first);
    }
    let mut acc = Accumulator::new();
    for p in parts {
        acc.merge(&p.to_accumulator());
    }
    Ok(acc.estimate(first.seed))
}

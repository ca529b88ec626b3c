//! Offspring laws for Galton-Watson processes.

use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Declarative offspring law, as written in family specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OffspringLaw {
    /// `p_k = 2^-(k+1)`: mean 1, variance 2.
    Geometric,
    Binomial {
        n: u32,
        p: f64,
    },
    Table {
        probabilities: Vec<f64>,
    },
    /// Critical law with `p_k ∝ k^-(2+gamma)` for `k >= 1`, truncated at
    /// `truncation`; infinite variance for `gamma < 1`.
    PowerTail {
        gamma: f64,
        truncation: usize,
    },
}

impl OffspringLaw {
    pub fn build(&self) -> Result<OffspringSpec> {
        match self {
            OffspringLaw::Geometric => Ok(OffspringSpec::geometric_half()),
            OffspringLaw::Binomial { n, p } => OffspringSpec::binomial(*n, *p),
            OffspringLaw::Table { probabilities } => {
                OffspringSpec::from_table(probabilities.clone())
            }
            OffspringLaw::PowerTail { gamma, truncation } => {
                OffspringSpec::power_tail(*gamma, *truncation)
            }
        }
    }
}

/// A tabulated offspring distribution `(p_k)` with its moments.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringSpec {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
    variance: f64,
    /// Mass dropped by truncating the table.
    tail_mass: f64,
}

const SUM_TOLERANCE: f64 = 1e-12;

impl OffspringSpec {
    fn with_tail(pmf: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidSpec(
                "offspring probabilities must be finite and >= 0".into(),
            ));
        }
        let total: f64 = pmf.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "offspring probabilities sum to {total}"
            )));
        }
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let second: f64 = pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64).powi(2) * p)
            .sum();
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(OffspringSpec {
            pmf,
            cdf,
            mean,
            variance: second - mean * mean,
            tail_mass,
        })
    }

    pub fn from_table(pmf: Vec<f64>) -> Result<Self> {
        Self::with_tail(pmf, 0.0)
    }

    /// `p_k = 2^-(k+1)`, tabulated until the tail is below `1e-30`.
    pub fn geometric_half() -> Self {
        let pmf: Vec<f64> = (0..100).map(|k| 0.5f64.powi(k + 1)).collect();
        let tail = 0.5f64.powi(100);
        Self::with_tail(pmf, tail).expect("geometric table is valid")
    }

    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidSpec("binomial p must lie in [0,1]".into()));
        }
        let mut pmf = Vec::with_capacity(n as usize + 1);
        let mut coeff = 1.0f64;
        for k in 0..=n {
            if k > 0 {
                coeff *= (n - k + 1) as f64 / k as f64;
            }
            pmf.push(coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
        }
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|q| *q /= total);
        Self::from_table(pmf)
    }

    /// Critical heavy-tailed law: `p_k = c k^-(2+gamma)` for `1 <= k <= N`
    /// with `c` chosen so the mean is one and `p_0` taking the remaining mass.
    /// The mass beyond `N` is estimated by an integral and recorded.
    pub fn power_tail(gamma: f64, truncation: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || truncation < 2 {
            return Err(Error::InvalidSpec(
                "power tail needs gamma > 0 and truncation >= 2".into(),
            ));
        }
        let weight = |k: usize| (k as f64).powf(-(2.0 + gamma));
        let mean_sum: f64 = (1..=truncation).map(|k| k as f64 * weight(k)).sum();
        let c = 1.0 / mean_sum;
        let mut pmf = vec![0.0; truncation + 1];
        for (k, q) in pmf.iter_mut().enumerate().skip(1) {
            *q = c * weight(k);
        }
        let positive: f64 = pmf.iter().sum();
        pmf[0] = 1.0 - positive;
        let n = truncation as f64 + 0.5;
        let tail = c * n.powf(-(1.0 + gamma)) / (1.0 + gamma);
        let mut spec = Self::from_table(pmf)?;
        spec.tail_mass = tail;
        Ok(spec)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_critical(&self) -> bool {
        (self.mean - 1.0).abs() <= SUM_TOLERANCE
    }

    pub fn require_critical(&self) -> Result<()> {
        if self.is_critical() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "offspring law is not critical (mean {})",
                self.mean
            )))
        }
    }

    /// The size-biased law `k p_k / mean`.
    pub fn size_biased(&self) -> Result<Self> {
        if self.mean <= 0.0 {
            return Err(Error::InvalidSpec(
                "size-biasing needs a positive mean".into(),
            ));
        }
        let pmf: Vec<f64> = self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p / self.mean)
            .collect();
        let total: f64 = pmf.iter().sum();
        Self::with_tail(pmf, (1.0 - total).max(0.0))
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.pmf.len() - 1) as u64
    }

    /// Probability generating function `Σ p_k s^k`.
    pub fn pgf(&self, s: f64) -> f64 {
        self.pmf.iter().rev().fold(0.0, |acc, p| acc * s + p)
    }

    /// `P(Z_n > 0) = 1 - f^(n)(0)` by iterating the generating function.
    pub fn survival_probability(&self, n: usize) -> f64 {
        let mut s = 0.0;
        for _ in 0..n {
            s = self.pgf(s);
        }
        1.0 - s
    }
}

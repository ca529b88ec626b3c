use crate::par::{map_indexed, Execution};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided 95% normal quantile.
pub fn z95() -> f64 {
    Normal::standard().inverse_cdf(0.975)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Mean,
    Proportion,
    Ratio,
    Difference,
    Median,
}

/// Monte Carlo point estimate with a 95% confidence interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub label: String,
    pub kind: EstimatorKind,
    pub estimate: f64,
    pub standard_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: u64,
    pub failures: u64,
    pub master_seed: u64,
}

impl EstimatorResult {
    /// Sample mean with a normal interval.
    pub fn from_values(label: impl Into<String>, values: &[f64], master_seed: u64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSpec(
                "an estimate needs at least two replicates".into(),
            ));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let h = z95() * se;
        Ok(EstimatorResult {
            label: label.into(),
            kind: EstimatorKind::Mean,
            estimate: mean,
            standard_error: se,
            ci_low: mean - h,
            ci_high: mean + h,
            replicates: values.len() as u64,
            failures: 0,
            master_seed,
        })
    }

    /// Proportion with a Wilson score interval.
    pub fn from_counts(
        label: impl Into<String>,
        successes: u64,
        trials: u64,
        master_seed: u64,
    ) -> Result<Self> {
        if trials < 2 || successes > trials {
            return Err(Error::InvalidSpec(
                "a proportion needs at least two trials".into(),
            ));
        }
        let p = successes as f64 / trials as f64;
        let (lo, hi) = wilson_interval(successes, trials, z95());
        Ok(EstimatorResult {
            label: label.into(),
            kind: EstimatorKind::Proportion,
            estimate: p,
            standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
            ci_low: lo.min(p),
            ci_high: hi.max(p),
            replicates: trials,
            failures: 0,
            master_seed,
        })
    }

    /// Sample median with a distribution-free order-statistic interval.
    pub fn median_of(label: impl Into<String>, values: &[f64], master_seed: u64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSpec(
                "an estimate needs at least two replicates".into(),
            ));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        let z = z95();
        let half = z * (n as f64).sqrt() / 2.0;
        let lo = ((n as f64 / 2.0 - half).floor().max(1.0) as usize).min(n) - 1;
        let hi = ((n as f64 / 2.0 + half).ceil() as usize).clamp(1, n) - 1;
        let (ci_low, ci_high) = (v[lo].min(median), v[hi].max(median));
        Ok(EstimatorResult {
            label: label.into(),
            kind: EstimatorKind::Median,
            estimate: median,
            standard_error: (ci_high - ci_low) / (2.0 * z),
            ci_low,
            ci_high,
            replicates: n as u64,
            failures: 0,
            master_seed,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub fn disjoint_from(&self, other: &EstimatorResult) -> bool {
        self.ci_high < other.ci_low || other.ci_high < self.ci_low
    }
}

/// Wilson score interval for `s` successes out of `n`.
pub fn wilson_interval(s: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = s as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Ratio of the means of paired samples `num/den` with a delta-method
/// interval.
pub fn ratio_of_means(
    label: impl Into<String>,
    num: &[f64],
    den: &[f64],
    master_seed: u64,
) -> Result<EstimatorResult> {
    if num.len() != den.len() || num.len() < 2 {
        return Err(Error::InvalidSpec(
            "ratio needs paired samples of length >= 2".into(),
        ));
    }
    let n = num.len() as f64;
    let ma = num.iter().sum::<f64>() / n;
    let mb = den.iter().sum::<f64>() / n;
    if mb == 0.0 {
        return Err(Error::InvalidSpec("denominator mean is zero".into()));
    }
    let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
    for (a, b) in num.iter().zip(den) {
        vaa += (a - ma) * (a - ma);
        vbb += (b - mb) * (b - mb);
        vab += (a - ma) * (b - mb);
    }
    let (vaa, vbb, vab) = (vaa / (n - 1.0), vbb / (n - 1.0), vab / (n - 1.0));
    let r = ma / mb;
    let var = (vaa - 2.0 * r * vab + r * r * vbb) / (mb * mb * n);
    let se = var.max(0.0).sqrt();
    let h = z95() * se;
    Ok(EstimatorResult {
        label: label.into(),
        kind: EstimatorKind::Ratio,
        estimate: r,
        standard_error: se,
        ci_low: r - h,
        ci_high: r + h,
        replicates: num.len() as u64,
        failures: 0,
        master_seed,
    })
}

/// Mean of the paired differences `later - earlier`.
pub fn mean_difference(
    label: impl Into<String>,
    later: &[f64],
    earlier: &[f64],
    master_seed: u64,
) -> Result<EstimatorResult> {
    let d: Vec<f64> = later.iter().zip(earlier).map(|(a, b)| a - b).collect();
    let mut r = EstimatorResult::from_values(label, &d, master_seed)?;
    r.kind = EstimatorKind::Difference;
    Ok(r)
}

/// Runs `f(replicate)` for every replicate and returns the successful values
/// in replicate order, with the number of failures. Aborts if more than
/// `max_failure_rate` of the replicates failed.
pub fn run_replicates<T, F>(
    replicates: u64,
    exec: Execution,
    max_failure_rate: f64,
    f: F,
) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let raw = map_indexed(replicates, exec, f);
    let mut ok = Vec::with_capacity(raw.len());
    let mut failed = 0u64;
    let mut last = String::new();
    for r in raw {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failed += 1;
                last = e.to_string();
            }
        }
    }
    if failed as f64 > max_failure_rate * replicates as f64 {
        return Err(Error::ReplicateFailures {
            failed: failed as usize,
            total: replicates as usize,
            last,
        });
    }
    Ok((ok, failed))
}

/// Default abort threshold for replicate failures.
pub const MAX_FAILURE_RATE: f64 = 0.05;

/// Mean of a real-valued replicate function.
pub fn estimate<F>(
    label: &str,
    replicates: u64,
    master_seed: u64,
    exec: Execution,
    f: F,
) -> Result<EstimatorResult>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    let (values, failures) = run_replicates(replicates, exec, MAX_FAILURE_RATE, f)?;
    let mut r = EstimatorResult::from_values(label, &values, master_seed)?;
    r.failures = failures;
    Ok(r)
}

/// Probability of a replicate event, with a Wilson interval.
pub fn estimate_proportion<F>(
    label: &str,
    replicates: u64,
    master_seed: u64,
    exec: Execution,
    max_failure_rate: f64,
    f: F,
) -> Result<EstimatorResult>
where
    F: Fn(u64) -> Result<bool> + Sync + Send,
{
    let (values, failures) = run_replicates(replicates, exec, max_failure_rate, f)?;
    let hits = values.iter().filter(|&&b| b).count() as u64;
    let mut r = EstimatorResult::from_counts(label, hits, values.len() as u64, master_seed)?;
    r.failures = failures;
    Ok(r)
}

use super::estimator::{ratio_of_means, run_replicates, EstimatorResult, MAX_FAILURE_RATE};
use crate::graph::Vertex;
use crate::par::Execution;
use crate::table::to_csv_with_header;
use crate::walks::{
    pair_collisions, triple_collisions, CollisionOptions, CollisionRecord, RngStream, WalkSpace,
};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub horizon: u64,
    pub mean: EstimatorResult,
    pub median: EstimatorResult,
}

/// Cumulative collision counts `Z(T)` at several horizons, one pair (or
/// triple) of walks per replicate.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthCurve {
    pub rows: Vec<GrowthRow>,
    pub horizons: Vec<u64>,
    /// `counts[h][k]`: count of replicate `k` at horizon `h`.
    #[serde(skip)]
    pub counts: Vec<Vec<f64>>,
    #[serde(skip)]
    pub records: Vec<CollisionRecord>,
}

impl GrowthCurve {
    pub(crate) fn from_records(
        records: Vec<CollisionRecord>,
        horizons: &[u64],
        what: &str,
        seed: u64,
    ) -> Result<Self> {
        let counts: Vec<Vec<f64>> = horizons
            .iter()
            .map(|&h| {
                records
                    .iter()
                    .map(|r| r.at(h).unwrap_or(0) as f64)
                    .collect()
            })
            .collect();
        let rows = horizons
            .iter()
            .zip(&counts)
            .map(|(&h, c)| {
                Ok(GrowthRow {
                    horizon: h,
                    mean: EstimatorResult::from_values(format!("mean {what}({h})"), c, seed)?,
                    median: EstimatorResult::median_of(format!("median {what}({h})"), c, seed)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(GrowthCurve {
            rows,
            horizons: horizons.to_vec(),
            counts,
            records,
        })
    }

    fn column(&self, horizon: u64) -> Result<&[f64]> {
        self.horizons
            .iter()
            .position(|&h| h == horizon)
            .map(|i| self.counts[i].as_slice())
            .ok_or_else(|| Error::InvalidSpec(format!("horizon {horizon} was not recorded")))
    }

    /// `mean Z(later) / mean Z(earlier)` with a delta-method interval.
    pub fn ratio(&self, later: u64, earlier: u64) -> Result<EstimatorResult> {
        let seed = self.rows.first().map(|r| r.mean.master_seed).unwrap_or(0);
        ratio_of_means(
            format!("Z({later})/Z({earlier})"),
            self.column(later)?,
            self.column(earlier)?,
            seed,
        )
    }

    /// Mean increment `Z(later) - Z(earlier)`.
    pub fn increment(&self, later: u64, earlier: u64) -> Result<EstimatorResult> {
        let seed = self.rows.first().map(|r| r.mean.master_seed).unwrap_or(0);
        super::estimator::mean_difference(
            format!("Z({later})-Z({earlier})"),
            self.column(later)?,
            self.column(earlier)?,
            seed,
        )
    }

    /// CSV with columns
    /// `horizon,mean,mean_se,mean_ci_low,mean_ci_high,median,median_ci_low,median_ci_high,replicates`.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                (
                    r.horizon,
                    r.mean.estimate,
                    r.mean.standard_error,
                    r.mean.ci_low,
                    r.mean.ci_high,
                    r.median.estimate,
                    r.median.ci_low,
                    r.median.ci_high,
                    r.mean.replicates,
                )
            })
            .collect();
        to_csv_with_header(
            &[
                "horizon",
                "mean",
                "mean_se",
                "mean_ci_low",
                "mean_ci_high",
                "median",
                "median_ci_low",
                "median_ci_high",
                "replicates",
            ],
            &rows,
        )
    }

    /// One JSON line per replicate.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_jsonl());
            s.push('\n');
        }
        s
    }
}

fn check_horizons(horizons: &[u64]) -> Result<u64> {
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec(
            "horizons must be nonempty and strictly increasing".into(),
        ));
    }
    Ok(*horizons.last().expect("nonempty"))
}

/// Growth of pair collisions `Z(T)` for two walks from `o`.
pub fn collision_growth_curve<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    horizons: &[u64],
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<GrowthCurve> {
    let top = check_horizons(horizons)?;
    let opts = CollisionOptions::with_checkpoints(horizons.to_vec());
    let (records, failures) = run_replicates(replicates, exec, MAX_FAILURE_RATE, |k| {
        pair_collisions(space, o, o, top, RngStream::new(seed, k), &opts)
    })?;
    let mut curve = GrowthCurve::from_records(records, horizons, "Z", seed)?;
    for r in &mut curve.rows {
        r.mean.failures = failures;
        r.median.failures = failures;
    }
    Ok(curve)
}

/// Growth of triple collisions for three walks from `o`.
pub fn triple_growth_curve<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    horizons: &[u64],
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<GrowthCurve> {
    let top = check_horizons(horizons)?;
    let opts = CollisionOptions::with_checkpoints(horizons.to_vec());
    let (records, _) = run_replicates(replicates, exec, MAX_FAILURE_RATE, |k| {
        triple_collisions(space, o, top, RngStream::new(seed, k), &opts)
    })?;
    GrowthCurve::from_records(records, horizons, "Z3", seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LatticeOracle;
    use crate::walks::OracleSpace;

    #[test]
    fn line_two_step_mean() {
        // E Z(2) = 1 + 1/2 + 3/8
        let line = LatticeOracle::line();
        let sp = OracleSpace::new(&line);
        let c = collision_growth_curve(
            &sp,
            &Vertex::lattice(0, 0),
            &[0, 1, 2],
            40_000,
            3,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(c.rows[0].mean.estimate, 1.0);
        assert!((c.rows[1].mean.estimate - 1.5).abs() < 4.0 * c.rows[1].mean.standard_error);
        assert!((c.rows[2].mean.estimate - 15.0 / 8.0).abs() < 4.0 * c.rows[2].mean.standard_error);
        assert!(c
            .rows
            .windows(2)
            .all(|w| w[1].mean.estimate >= w[0].mean.estimate));
        assert!(c.to_csv().unwrap().starts_with("horizon,mean,"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let line = LatticeOracle::line();
        let sp = OracleSpace::new(&line);
        let o = Vertex::lattice(0, 0);
        let a = collision_growth_curve(&sp, &o, &[10, 100], 200, 9, Execution::Sequential).unwrap();
        let b = collision_growth_curve(&sp, &o, &[10, 100], 200, 9, Execution::Threads(4)).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.to_jsonl(), b.to_jsonl());
    }
}

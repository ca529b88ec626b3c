use super::estimator::MAX_FAILURE_RATE;
use super::growth::GrowthCurve;
use crate::families::sample_percolation_cluster;
use crate::graph::Vertex;
use crate::par::{map_indexed, Execution};
use crate::walks::{run_pair, CollisionRecord, IndexSpace, RngStream, LANE_ENV};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    /// The cluster vertex nearest the origin.
    #[default]
    Root,
    /// A uniform cluster vertex, drawn per pair.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationRunConfig {
    pub p: f64,
    pub half_width: i64,
    pub horizons: Vec<u64>,
    pub clusters: u64,
    pub pairs_per_cluster: u64,
    /// Collisions are counted from this time on.
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    #[serde(default)]
    pub start: StartPolicy,
}

fn default_burn_in() -> u64 {
    1000
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterRecord {
    pub cluster: u64,
    pub size: usize,
    pub density: f64,
    pub mean_final_z: f64,
    /// Walker visits to vertices on the edge of the box.
    pub box_edge_visits: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PercolationRun {
    pub curve: GrowthCurve,
    pub clusters: Vec<ClusterRecord>,
}

/// Pair walks on sampled supercritical clusters, counting collisions at
/// `burn_in ≤ t ≤ T` for each horizon `T`.
pub fn percolation_collision_run(
    config: &PercolationRunConfig,
    seed: u64,
    exec: Execution,
) -> Result<PercolationRun> {
    if !(config.p > 0.5 && config.p <= 1.0) {
        return Err(Error::InvalidSpec(
            "percolation runs need 1/2 < p <= 1".into(),
        ));
    }
    let h = &config.horizons;
    if h.is_empty() || h.windows(2).any(|w| w[0] >= w[1]) || h[0] < config.burn_in {
        return Err(Error::InvalidSpec(
            "horizons must increase strictly and start at or after the burn-in".into(),
        ));
    }
    if config.pairs_per_cluster == 0 || config.clusters == 0 {
        return Err(Error::InvalidSpec(
            "need at least one cluster and one pair".into(),
        ));
    }
    let top = *h.last().expect("nonempty");
    let l = config.half_width;
    let mut records = Vec::new();
    let mut clusters = Vec::new();
    let mut failed = 0u64;
    for c in 0..config.clusters {
        let env_seed: u64 = RngStream::new(seed, c).lane(LANE_ENV).random();
        let cluster = sample_percolation_cluster(config.p, l, env_seed)?;
        let g = &cluster.graph;
        let space = IndexSpace::new(g);
        let on_edge: Vec<bool> = g
            .vertices()
            .iter()
            .map(|v| matches!(*v, Vertex::Lattice { x, y } if x.abs().max(y.abs()) == l))
            .collect();
        let base = c * config.pairs_per_cluster;
        let runs: Vec<Result<(CollisionRecord, u64)>> =
            map_indexed(config.pairs_per_cluster, exec, |j| {
                let stream = RngStream::new(seed, base + j);
                let start = match config.start {
                    StartPolicy::Root => g.vertex(g.root()),
                    StartPolicy::Uniform => {
                        g.vertex(stream.lane(LANE_ENV).random_range(0..g.len()))
                    }
                };
                let mut rec = CollisionRecord {
                    stream_id: base + j,
                    horizon: top,
                    ..Default::default()
                };
                let mut edge_visits = 0u64;
                let mut next = 0usize;
                run_pair(&space, &start, &start, top, stream, |t, x, y| {
                    edge_visits += on_edge[x as usize] as u64 + on_edge[y as usize] as u64;
                    if t >= config.burn_in && x == y {
                        rec.z += 1;
                        rec.last_collision_time = Some(t);
                    }
                    while h.get(next) == Some(&t) {
                        rec.checkpoints.push((t, rec.z));
                        next += 1;
                    }
                    true
                })?;
                Ok((rec, edge_visits))
            });
        let mut visits = 0u64;
        let mut finals = Vec::new();
        for r in runs {
            match r {
                Ok((rec, v)) => {
                    visits += v;
                    finals.push(rec.z as f64);
                    records.push(rec);
                }
                Err(_) => failed += 1,
            }
        }
        clusters.push(ClusterRecord {
            cluster: c,
            size: g.len(),
            density: cluster.density,
            mean_final_z: finals.iter().sum::<f64>() / finals.len().max(1) as f64,
            box_edge_visits: visits,
        });
    }
    let total = config.clusters * config.pairs_per_cluster;
    if failed as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(Error::ReplicateFailures {
            failed: failed as usize,
            total: total as usize,
            last: "walk error".into(),
        });
    }
    let curve = GrowthCurve::from_records(records, h, "Z", seed)?;
    Ok(PercolationRun { curve, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_box_growth_and_confinement() {
        let cfg = PercolationRunConfig {
            p: 1.0,
            half_width: 30,
            horizons: vec![100, 1000, 4000],
            clusters: 2,
            pairs_per_cluster: 100,
            burn_in: 10,
            start: StartPolicy::Root,
        };
        let run = percolation_collision_run(&cfg, 3, Execution::Parallel).unwrap();
        assert_eq!(run.clusters[0].size, 61 * 61);
        let inc = run.curve.increment(4000, 1000).unwrap();
        assert!(inc.estimate > 0.0);
        let a = percolation_collision_run(&cfg, 3, Execution::Sequential).unwrap();
        assert_eq!(a.curve.to_csv().unwrap(), run.curve.to_csv().unwrap());
    }

    #[test]
    fn subcritical_is_rejected() {
        let cfg = PercolationRunConfig {
            p: 0.4,
            half_width: 5,
            horizons: vec![1000],
            clusters: 1,
            pairs_per_cluster: 1,
            burn_in: 0,
            start: StartPolicy::Uniform,
        };
        assert!(percolation_collision_run(&cfg, 0, Execution::Sequential).is_err());
    }
}

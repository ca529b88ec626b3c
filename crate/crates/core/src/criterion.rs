//! Numerical evaluation of the sufficient conditions for infinitely many
//! collisions: the Green-ratio scan over growing regions and the resistance
//! growth sets `J(λ)`.

use crate::experiments::{estimate_proportion, EstimatorResult};
use crate::families::KestenTree;
use crate::graph::{
    ball_region, extract_region, FiniteGraph, FiniteRegion, NeighborOracle, Vertex,
};
use crate::par::{map_indexed, Execution};
use crate::potential::{effective_resistance, green_kernel};
use crate::table::to_csv_with_header;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedRatio,
    GrowingRatio,
    Inconclusive,
}

/// Slope thresholds for the verdict hint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeThresholds {
    pub bounded: f64,
    pub growing: f64,
}

impl Default for SlopeThresholds {
    fn default() -> Self {
        SlopeThresholds {
            bounded: 0.1,
            growing: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: u64,
    pub interior_count: usize,
    pub g_root: f64,
    pub g_max: f64,
    pub ratio: f64,
    pub argmax: Option<Vertex>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionScan {
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `ln ratio` against `ln r` over successful rows.
    pub slope: Option<f64>,
    pub verdict: Verdict,
    pub thresholds: SlopeThresholds,
}

impl CriterionScan {
    pub fn max_ratio(&self) -> f64 {
        self.ok_rows().map(|r| r.ratio).fold(f64::NAN, f64::max)
    }

    pub fn ok_rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.error.is_none())
    }

    /// CSV with columns `r,g_root,g_max,ratio,argmax,interior_count,error`.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            r: u64,
            g_root: f64,
            g_max: f64,
            ratio: f64,
            argmax: String,
            interior_count: usize,
            error: &'a str,
        }
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|r| Row {
                r: r.r,
                g_root: r.g_root,
                g_max: r.g_max,
                ratio: r.ratio,
                argmax: r.argmax.map(|v| v.to_string()).unwrap_or_default(),
                interior_count: r.interior_count,
                error: r.error.as_deref().unwrap_or(""),
            })
            .collect();
        to_csv_with_header(
            &[
                "r",
                "g_root",
                "g_max",
                "ratio",
                "argmax",
                "interior_count",
                "error",
            ],
            &rows,
        )
    }

    pub fn verdict_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict,
            "slope": self.slope,
            "thresholds": self.thresholds,
            "max_ratio": self.max_ratio(),
            "failed_rows": self.rows.iter().filter(|r| r.error.is_some()).count(),
        })
    }
}

/// The slab `{|x| ≤ r}` for combs and `ℤ`, `{max(|x1|,|x2|) ≤ r}` for
/// `Comb(ℤ²)` and `ℤ²`.
pub fn slab_region(root: Vertex, r: u64) -> FiniteRegion {
    let r = r as i64;
    FiniteRegion::new(root, format!("slab(r={r})"), move |v| match *v {
        Vertex::Comb { x, .. } => x.abs() <= r,
        Vertex::Comb2 { x1, x2, .. } => x1.abs().max(x2.abs()) <= r,
        Vertex::Lattice { x, y } => x.abs().max(y.abs()) <= r,
        _ => false,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn scan_row<O: NeighborOracle + ?Sized>(
    oracle: &O,
    r: u64,
    region: &FiniteRegion,
    cap: usize,
) -> Result<ScanRow> {
    let g = extract_region(oracle, region, cap)?;
    let rep = green_kernel(&g, g.root())?;
    let (mut g_max, mut argmax) = (f64::MIN, None);
    for e in &rep.entries {
        let d = e
            .g_diag
            .ok_or_else(|| Error::InvalidSpec("region too large for the Green diagonal".into()))?;
        if d > g_max {
            g_max = d;
            argmax = Some(e.vertex);
        }
    }
    Ok(ScanRow {
        r,
        interior_count: rep.interior_count,
        g_root: rep.green_root,
        g_max,
        ratio: g_max / rep.green_root,
        argmax,
        error: None,
    })
}

/// Green-ratio scan `max_v g_{B_r}(v,v) / g_{B_r}(o,o)` over `(r, B_r)`.
/// Rows run in parallel; a failing row is kept and marked.
pub fn green_ratio_scan<O: NeighborOracle + ?Sized>(
    oracle: &O,
    regions: &[(u64, FiniteRegion)],
    thresholds: SlopeThresholds,
    cap: usize,
    exec: Execution,
) -> CriterionScan {
    let rows: Vec<ScanRow> = map_indexed(regions.len() as u64, exec, |i| {
        let (r, region) = &regions[i as usize];
        scan_row(oracle, *r, region, cap).unwrap_or_else(|e| ScanRow {
            r: *r,
            interior_count: 0,
            g_root: f64::NAN,
            g_max: f64::NAN,
            ratio: f64::NAN,
            argmax: None,
            error: Some(e.to_string()),
        })
    });
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error.is_none() && r.r > 0)
        .map(|r| ((r.r as f64).ln(), r.ratio.ln()))
        .collect();
    let slope = least_squares_slope(&points);
    let verdict = match slope {
        Some(s) if s < thresholds.bounded => Verdict::BoundedRatio,
        Some(s) if s > thresholds.growing => Verdict::GrowingRatio,
        _ => Verdict::Inconclusive,
    };
    CriterionScan {
        rows,
        slope,
        verdict,
        thresholds,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JLambda {
    pub r: u64,
    pub lambda: f64,
    pub resistance: f64,
    pub member: bool,
}

/// `r ∈ J(λ)` iff `R_eff(o, B_r^c) ≥ r/λ`, for `g` extracted from the ball of
/// radius `r` around its root.
pub fn j_lambda(g: &FiniteGraph, r: u64, lambda: f64) -> Result<JLambda> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidSpec("lambda must be >= 1".into()));
    }
    let res = effective_resistance(g, &[g.root()], &g.boundary())?.resistance;
    Ok(JLambda {
        r,
        lambda,
        resistance: res,
        member: res >= r as f64 / lambda,
    })
}

/// Fraction of sampled graphs with `r ∈ J(λ)` for each `λ`, sharing the
/// samples across `λ` so the estimates are monotone in `λ`. `sampler(k)`
/// returns the `k`-th rooted graph, whose interior must contain the
/// `r`-ball around the root.
pub fn estimate_j_prob<F>(
    sampler: F,
    r: u64,
    lambdas: &[f64],
    samples: u64,
    seed: u64,
    cap: usize,
    exec: Execution,
) -> Result<Vec<EstimatorResult>>
where
    F: Fn(u64) -> Result<FiniteGraph> + Sync + Send,
{
    let resistance = |k: u64| -> Result<f64> {
        let g = sampler(k)?;
        let root = g.vertex(g.root());
        let ball = ball_region(&g, root, r, cap)?;
        let b = extract_region(&g, &ball, cap)?;
        if b.boundary().iter().any(|&v| b.distance(v) as u64 != r + 1) {
            return Err(Error::InvalidSpec(
                "sampled graph does not contain the r-ball".into(),
            ));
        }
        Ok(effective_resistance(&b, &[b.root()], &b.boundary())?.resistance)
    };
    let values: Vec<Result<f64>> = map_indexed(samples, exec, resistance);
    lambdas
        .iter()
        .map(|&lambda| {
            estimate_proportion(
                &format!("P(r={r} in J(lambda={lambda}))"),
                samples,
                seed,
                Execution::Sequential,
                0.2,
                |k| match &values[k as usize] {
                    Ok(res) => Ok(*res >= r as f64 / lambda),
                    Err(e) => Err(Error::InvalidSpec(e.to_string())),
                },
            )
        })
        .collect()
}

/// Backbone ball of a Kesten tree: backbone vertices `0..=r` with their
/// hanging trees, each cut below depth `r/ε`.
#[derive(Clone, Debug)]
pub struct KestenRegion {
    pub graph: FiniteGraph,
    /// `N_r^ε`: hanging trees of depth greater than `r/ε`.
    pub deep_trees: usize,
    pub depth_cut: u64,
}

/// Depth of a hanging tree counts generations below its own root.
pub fn kesten_region(tree: &KestenTree, r: usize, epsilon: f64) -> Result<KestenRegion> {
    let height = tree.backbone.len() - 1;
    if height < r + 1 {
        return Err(Error::HeightTooSmall { height, radius: r });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidSpec("epsilon must be positive".into()));
    }
    let depth_cut = (r as f64 / epsilon).floor() as u64;
    let g = &tree.graph;
    let mut members: HashSet<Vertex> = tree.backbone[..=r].iter().map(|&i| g.vertex(i)).collect();
    let mut deep_trees = 0;
    for level in &tree.hanging[..=r] {
        for h in level {
            if h.depth > depth_cut || (h.depth == depth_cut && h.depth_capped) {
                deep_trees += 1;
            }
            let mut queue = VecDeque::from([(h.root, 0u64)]);
            let mut seen = HashSet::from([h.root]);
            while let Some((v, d)) = queue.pop_front() {
                members.insert(g.vertex(v));
                if d == depth_cut {
                    continue;
                }
                for &w in g.neighbors(v) {
                    let w = w as usize;
                    // hanging trees never touch the backbone below their root
                    if g.distance(w) > g.distance(v) && seen.insert(w) {
                        queue.push_back((w, d + 1));
                    }
                }
            }
        }
    }
    let region = FiniteRegion::from_set(
        g.vertex(tree.backbone[0]),
        format!("kesten(r={r},eps={epsilon})"),
        members,
    );
    let graph = extract_region(g, &region, usize::MAX)?;
    Ok(KestenRegion {
        graph,
        deep_trees,
        depth_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        sample_kesten_tree, CombOracle, CombSpec, KestenConfig, OffspringSpec, SphericalTreeOracle,
        SphericalTreeSpec,
    };
    use crate::graph::LatticeOracle;
    use crate::potential::tree_resistance_to_boundary;

    fn slabs(root: Vertex, rs: &[u64]) -> Vec<(u64, FiniteRegion)> {
        rs.iter().map(|&r| (r, slab_region(root, r))).collect()
    }

    #[test]
    fn comb_phase_contrast_small() {
        let one = CombOracle::new(CombSpec::wedge(1.0)).unwrap();
        let s = green_ratio_scan(
            &one,
            &slabs(Vertex::comb(0, 0), &[4, 8, 16]),
            SlopeThresholds::default(),
            1 << 20,
            Execution::Sequential,
        );
        assert!(s.rows.iter().all(|r| r.ratio >= 1.0 - 1e-12));
        assert!(s.rows.windows(2).all(|w| w[1].g_root >= w[0].g_root));
        assert!(s.max_ratio() <= 4.0);
        let two = CombOracle::new(CombSpec::wedge(2.0)).unwrap();
        let s = green_ratio_scan(
            &two,
            &slabs(Vertex::comb(0, 0), &[4, 8, 16]),
            SlopeThresholds::default(),
            1 << 20,
            Execution::Sequential,
        );
        assert_eq!(s.verdict, Verdict::GrowingRatio);
        let csv = s.to_csv().unwrap();
        assert!(csv.starts_with("r,g_root,g_max,ratio,argmax,interior_count,error\n4,"));
    }

    #[test]
    fn line_ratio_is_flat() {
        let s = green_ratio_scan(
            &LatticeOracle::line(),
            &slabs(Vertex::lattice(0, 0), &[4, 8, 16, 32]),
            SlopeThresholds::default(),
            1 << 20,
            Execution::Sequential,
        );
        assert!(s.max_ratio() <= 2.0);
        assert_eq!(s.verdict, Verdict::BoundedRatio);
    }

    #[test]
    fn failed_rows_are_marked() {
        let line = LatticeOracle::line();
        let s = green_ratio_scan(
            &line,
            &slabs(Vertex::lattice(0, 0), &[4, 400]),
            SlopeThresholds::default(),
            100,
            Execution::Sequential,
        );
        assert!(s.rows[0].error.is_none());
        assert!(s.rows[1].error.is_some());
        assert_eq!(s.verdict, Verdict::Inconclusive);
    }

    fn tree_ball(spec: SphericalTreeSpec, r: u64) -> FiniteGraph {
        let t = SphericalTreeOracle::new(spec).unwrap();
        let ball = ball_region(&t, t.root(), r, 1 << 20).unwrap();
        extract_region(&t, &ball, 1 << 20).unwrap()
    }

    #[test]
    fn j_lambda_examples() {
        let half = tree_ball(SphericalTreeSpec::half_line(), 10);
        let j = j_lambda(&half, 10, 1.0).unwrap();
        assert!(j.member && (j.resistance - 11.0).abs() < 1e-9);
        let binary = tree_ball(SphericalTreeSpec::explicit(vec![1; 12]), 8);
        let j = j_lambda(&binary, 8, 1.0).unwrap();
        assert!(!j.member);
        assert!(
            (j.resistance - tree_resistance_to_boundary(&binary, binary.root()).unwrap()).abs()
                < 1e-9
        );
        let zero = tree_ball(SphericalTreeSpec::explicit(vec![1; 3]), 0);
        assert!(j_lambda(&zero, 0, 1.0).unwrap().member);
    }

    #[test]
    fn deterministic_sampler_gives_one() {
        let half = tree_ball(SphericalTreeSpec::half_line(), 30);
        let est = estimate_j_prob(
            |_| Ok(half.clone()),
            20,
            &[1.0, 2.0],
            10,
            0,
            1 << 20,
            Execution::Sequential,
        )
        .unwrap();
        assert!(est.iter().all(|e| e.estimate == 1.0));
    }

    #[test]
    fn kesten_region_on_a_path() {
        let one = OffspringSpec::from_table(vec![0.0, 1.0]).unwrap();
        let t = sample_kesten_tree(&one, &KestenConfig::new(12), 1).unwrap();
        let k = kesten_region(&t, 10, 0.1).unwrap();
        assert_eq!(k.deep_trees, 0);
        assert_eq!(k.graph.interior_count(), 11);
        let rep = green_kernel(&k.graph, k.graph.root()).unwrap();
        assert!((rep.green_root - 11.0).abs() < 1e-9);
        assert!(matches!(
            kesten_region(&t, 12, 0.1),
            Err(Error::HeightTooSmall { .. })
        ));
    }

    #[test]
    fn kesten_region_identity() {
        let geo = OffspringSpec::geometric_half();
        let t = sample_kesten_tree(&geo, &KestenConfig::new(40), 5).unwrap();
        let k = kesten_region(&t, 30, 0.2).unwrap();
        let rep = green_kernel(&k.graph, k.graph.root()).unwrap();
        assert!((rep.green_root - rep.resistance_root).abs() < 1e-9);
        let rec = tree_resistance_to_boundary(&k.graph, k.graph.root()).unwrap();
        assert!((rec - rep.green_root).abs() < 1e-9);
    }
}

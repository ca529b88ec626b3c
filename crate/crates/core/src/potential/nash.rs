use crate::families::{SphericalTreeOracle, SphericalTreeSpec};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutSumRow {
    pub n: u64,
    /// `|Π*_{2n}|`.
    pub pi_star: u64,
    /// `|E_{2n}|`: product-graph edges with an endpoint in `Π*_{2n}`.
    pub cut_size: u64,
    /// `Σ_{m≤n} 1/|E_{2m}|`.
    pub partial_sum: f64,
    /// `Σ_{2≤m≤n} 1/(m (ln m)^{2/β})`, or `NaN` without a `β`.
    pub comparison_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NashWilliamsReport {
    pub beta: Option<f64>,
    pub rows: Vec<CutSumRow>,
}

impl NashWilliamsReport {
    /// True if the cut-sum partial sums increase strictly along the rows.
    pub fn strictly_increasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].partial_sum > w[0].partial_sum)
    }
}

/// Per-level sphere size and vertex degree of the tree.
struct Levels<'a> {
    tree: &'a SphericalTreeOracle,
}

impl Levels<'_> {
    fn size(&self, m: u64) -> u64 {
        self.tree.sphere_size(m)
    }

    fn degree(&self, m: u64) -> u64 {
        if m == 0 {
            1
        } else if (1..=self.tree.levels()).any(|k| self.tree.branch_point_distance(k) == Some(m)) {
            3
        } else {
            2
        }
    }
}

/// Cut sizes of the product walk on `T × T` (both coordinates move at every
/// step) for the cutsets `E_{2n}`, `n = 1..=n_max`.
///
/// With `L_i = |Π_i|`, `d_i` the degree at distance `i` and
/// `S_m = Σ_{i≤m} L_i d_i`, the edges meeting `Π*_m` number
/// `2 L_m d_m S_m - (L_m d_m)² - L_m²`: the degree sum over `Π*_m` minus the
/// edges with both ends in it, which join `Π_m × Π_{m-1}` to `Π_{m-1} × Π_m`.
pub fn nash_williams_cutsum(spec: &SphericalTreeSpec, n_max: u64) -> Result<NashWilliamsReport> {
    let tree = SphericalTreeOracle::new(spec.clone())?;
    let top = 2 * n_max;
    if let Some(max) = tree.max_distance() {
        if top >= max {
            return Err(Error::DepthCapExceeded {
                vertex: format!("level {top}"),
                max_distance: max,
            });
        }
    }
    let levels = Levels { tree: &tree };
    let beta = match spec.lengths {
        crate::families::BranchLengths::Doubly { beta } => Some(beta),
        _ => None,
    };
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut s: u128 = 0;
    let mut spheres: u128 = 0;
    let mut partial = 0.0;
    let mut comparison = 0.0;
    let mut m = 0u64;
    for n in 1..=n_max {
        let target = 2 * n;
        while m <= target {
            s += (levels.size(m) * levels.degree(m)) as u128;
            spheres += levels.size(m) as u128;
            m += 1;
        }
        let l = levels.size(target) as u128;
        let ld = l * levels.degree(target) as u128;
        let cut = 2 * ld * s - ld * ld - l * l;
        let pi_star = 2 * l * spheres - l * l;
        partial += 1.0 / cut as f64;
        if let Some(beta) = beta {
            if n >= 2 {
                let nf = n as f64;
                comparison += 1.0 / (nf * nf.ln().powf(2.0 / beta));
            }
        }
        rows.push(CutSumRow {
            n,
            pi_star: pi_star as u64,
            cut_size: cut as u64,
            partial_sum: partial,
            comparison_sum: if beta.is_some() { comparison } else { f64::NAN },
        });
    }
    Ok(NashWilliamsReport { beta, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball_region, extract_region, NeighborOracle, Vertex};
    use std::collections::HashMap;

    /// Counts the tensor-product edges meeting `Π*_m` by enumeration.
    fn brute_cut(spec: &SphericalTreeSpec, m: u64) -> (u64, u64) {
        let tree = SphericalTreeOracle::new(spec.clone()).unwrap();
        let ball = ball_region(&tree, tree.root(), m + 1, 1 << 20).unwrap();
        let g = extract_region(&tree, &ball, 1 << 20).unwrap();
        let verts: Vec<Vertex> = g.vertices().to_vec();
        let dist: HashMap<Vertex, u64> = verts
            .iter()
            .map(|v| (*v, tree.distance(v).unwrap()))
            .collect();
        let in_star = |x: &Vertex, y: &Vertex| dist[x].max(dist[y]) == m;
        let mut edges = 0u64;
        let mut star = 0u64;
        for x in &verts {
            for y in &verts {
                if dist[x].max(dist[y]) > m {
                    continue;
                }
                if in_star(x, y) {
                    star += 1;
                }
                for x2 in tree.neighbors(x).unwrap() {
                    for y2 in tree.neighbors(y).unwrap() {
                        let a = in_star(x, y);
                        let b = in_star(&x2, &y2);
                        // count each undirected edge once, from its smaller end
                        if (a || b) && ((x, y) < (&x2, &y2) || !(dist[&x2].max(dist[&y2]) <= m)) {
                            edges += 1;
                        }
                    }
                }
            }
        }
        (star, edges)
    }

    #[test]
    fn formula_matches_enumeration() {
        for spec in [
            SphericalTreeSpec::explicit(vec![1, 2, 1]),
            SphericalTreeSpec::explicit(vec![2, 3, 5]),
            SphericalTreeSpec::half_line(),
        ] {
            let rep = nash_williams_cutsum(&spec, 4).unwrap();
            for row in &rep.rows {
                let (star, edges) = brute_cut(&spec, 2 * row.n);
                assert_eq!(row.pi_star, star, "{spec:?} n={}", row.n);
                assert_eq!(row.cut_size, edges, "{spec:?} n={}", row.n);
            }
        }
    }

    #[test]
    fn half_line_counts() {
        let rep = nash_williams_cutsum(&SphericalTreeSpec::half_line(), 50).unwrap();
        for row in &rep.rows {
            assert_eq!(row.pi_star, 4 * row.n + 1);
            assert_eq!(row.cut_size, 16 * row.n - 1);
        }
        assert!(rep.strictly_increasing());
    }

    #[test]
    fn beta_two_range() {
        let spec = SphericalTreeSpec::doubly(2.0, 2);
        let rep = nash_williams_cutsum(&spec, 30_000).unwrap();
        assert!(rep.strictly_increasing());
        assert!(rep.rows.last().unwrap().comparison_sum > 0.0);
        assert!(nash_williams_cutsum(&spec, 40_000).is_err());
    }
}

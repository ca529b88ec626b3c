//! Spherically symmetric binary trees: a segment of length `b_0` from the
//! root, then at every branch point two segments of the next length.

use crate::graph::{FamilyTag, NeighborOracle, Vertex};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchLengths {
    /// `b_j = 2^(2^(beta j))`.
    Doubly { beta: f64 },
    /// Explicit lengths; past the last listed branch point every branch
    /// continues as an infinite ray.
    Explicit { lengths: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalTreeSpec {
    pub lengths: BranchLengths,
    /// Maximal number of branch points materialized.
    pub depth_cap: usize,
}

impl SphericalTreeSpec {
    pub fn doubly(beta: f64, depth_cap: usize) -> Self {
        SphericalTreeSpec {
            lengths: BranchLengths::Doubly { beta },
            depth_cap,
        }
    }

    pub fn explicit(lengths: Vec<u64>) -> Self {
        let depth_cap = lengths.len();
        SphericalTreeSpec {
            lengths: BranchLengths::Explicit { lengths },
            depth_cap,
        }
    }

    /// The half-line: no branch point at all.
    pub fn half_line() -> Self {
        Self::explicit(Vec::new())
    }
}

/// `2^(2^(beta j))`, or `None` when it does not fit in 63 bits.
pub fn doubly_exponential_length(beta: f64, j: usize) -> Option<u64> {
    let e = (beta * j as f64).exp2();
    if e >= 62.0 {
        return None;
    }
    Some((e.exp2() + 1e-9).floor().max(1.0) as u64)
}

/// Lazy adjacency of a spherically symmetric tree.
#[derive(Clone, Debug)]
pub struct SphericalTreeOracle {
    spec: SphericalTreeSpec,
    /// Segment lengths `b_0..b_K` (the last one only when the tree is capped).
    lengths: Vec<u64>,
    /// `a_0 = 0, a_1, ..., a_K`: distances of the branch points.
    branch_distance: Vec<u64>,
    /// Largest materialized distance; `None` when the tree ends in rays.
    max_distance: Option<u64>,
}

impl SphericalTreeOracle {
    pub fn new(spec: SphericalTreeSpec) -> Result<Self> {
        let (levels, lengths, max_distance_known) = match &spec.lengths {
            BranchLengths::Doubly { beta } => {
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::InvalidSpec("beta must be positive".into()));
                }
                let k = spec.depth_cap;
                let lengths = (0..=k)
                    .map(|j| doubly_exponential_length(*beta, j))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| {
                        Error::InvalidSpec(format!(
                            "b_j = 2^(2^(beta j)) overflows for beta={beta} within depth cap {k}"
                        ))
                    })?;
                (k, lengths, true)
            }
            BranchLengths::Explicit { lengths } => {
                if lengths.contains(&0) {
                    return Err(Error::InvalidSpec("segment lengths must be >= 1".into()));
                }
                if spec.depth_cap >= lengths.len() {
                    (lengths.len(), lengths.clone(), false)
                } else {
                    (spec.depth_cap, lengths[..=spec.depth_cap].to_vec(), true)
                }
            }
        };
        if levels > 63 {
            return Err(Error::InvalidSpec(
                "at most 63 branch levels are supported".into(),
            ));
        }
        let mut branch_distance = vec![0u64];
        for j in 0..levels {
            let next = branch_distance[j]
                .checked_add(lengths[j])
                .ok_or_else(|| Error::InvalidSpec("branch distances overflow".into()))?;
            branch_distance.push(next);
        }
        let max_distance = if max_distance_known {
            Some(
                branch_distance[levels]
                    .checked_add(lengths[levels])
                    .ok_or_else(|| Error::InvalidSpec("tree depth overflows".into()))?,
            )
        } else {
            None
        };
        Ok(SphericalTreeOracle {
            spec,
            lengths,
            branch_distance,
            max_distance,
        })
    }

    pub fn spec(&self) -> &SphericalTreeSpec {
        &self.spec
    }

    pub fn root(&self) -> Vertex {
        Vertex::Tree {
            branches: 0,
            path: 0,
            offset: 0,
        }
    }

    /// Number of materialized branch points `K`.
    pub fn levels(&self) -> usize {
        self.branch_distance.len() - 1
    }

    /// Segment length `b_j` (`None` past the last branch point of a ray tree).
    pub fn segment_length(&self, j: usize) -> Option<u64> {
        self.lengths.get(j).copied()
    }

    /// `a_n = Σ_{i<n} b_i`, the distance of the `n`-th branch point.
    pub fn branch_point_distance(&self, n: usize) -> Option<u64> {
        self.branch_distance.get(n).copied()
    }

    pub fn max_distance(&self) -> Option<u64> {
        self.max_distance
    }

    /// Number of branch points at distance strictly less than `m`.
    pub fn branch_count_at(&self, m: u64) -> usize {
        self.branch_distance[1..]
            .iter()
            .take_while(|&&a| a < m)
            .count()
    }

    /// `|Π_m|`, the number of vertices at distance `m`.
    pub fn sphere_size(&self, m: u64) -> u64 {
        1u64 << self.branch_count_at(m)
    }

    pub fn distance(&self, v: &Vertex) -> Result<u64> {
        match *v {
            Vertex::Tree {
                branches, offset, ..
            } if self.contains(v) => Ok(self.branch_distance[branches as usize] + offset),
            _ => Err(Error::UnknownVertex(v.to_string())),
        }
    }

    /// Number of branch points on the root path strictly before `v`.
    pub fn branch_count(&self, v: &Vertex) -> Result<usize> {
        match *v {
            Vertex::Tree { branches, .. } if self.contains(v) => Ok(branches as usize),
            _ => Err(Error::UnknownVertex(v.to_string())),
        }
    }

    /// Number of vertices at the same distance as `v`, `2^branch_count`.
    pub fn branches_at_level(&self, v: &Vertex) -> Result<u64> {
        Ok(1u64 << self.branch_count(v)?)
    }

    /// Membership in the segment class `J_n` (vertices with `2^n` copies at
    /// their level).
    pub fn in_segment_class(&self, v: &Vertex, n: usize) -> bool {
        self.branch_count(v).map(|k| k == n).unwrap_or(false)
    }

    fn is_branch_point(&self, branches: usize, offset: u64) -> bool {
        branches < self.levels() && offset == self.lengths[branches]
    }

    fn cap_error(&self, v: &Vertex) -> Error {
        Error::DepthCapExceeded {
            vertex: v.to_string(),
            max_distance: self.max_distance.unwrap_or(u64::MAX),
        }
    }

    fn parent(&self, branches: usize, path: u64, offset: u64) -> Option<Vertex> {
        if branches == 0 {
            (offset > 0).then(|| Vertex::Tree {
                branches: 0,
                path: 0,
                offset: offset - 1,
            })
        } else if offset > 1 {
            Some(Vertex::Tree {
                branches: branches as u8,
                path,
                offset: offset - 1,
            })
        } else {
            let b = branches - 1;
            Some(Vertex::Tree {
                branches: b as u8,
                path: path & ((1u64 << b) - 1),
                offset: self.lengths[b],
            })
        }
    }

    fn children(&self, v: &Vertex) -> Result<([Vertex; 2], usize)> {
        let Vertex::Tree {
            branches,
            path,
            offset,
        } = *v
        else {
            return Err(Error::UnknownVertex(v.to_string()));
        };
        let k = branches as usize;
        let d = self.branch_distance[k] + offset;
        if self.is_branch_point(k, offset) {
            let child = |c: u64| Vertex::Tree {
                branches: branches + 1,
                path: path | (c << k),
                offset: 1,
            };
            return Ok(([child(0), child(1)], 2));
        }
        if self.max_distance.is_some_and(|m| d >= m) {
            return Err(self.cap_error(v));
        }
        let next = Vertex::Tree {
            branches,
            path,
            offset: offset + 1,
        };
        Ok(([next, next], 1))
    }
}

impl NeighborOracle for SphericalTreeOracle {
    fn family(&self) -> FamilyTag {
        FamilyTag::SphericalTree
    }

    fn degree(&self, v: &Vertex) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let Vertex::Tree {
            branches, offset, ..
        } = *v
        else {
            unreachable!()
        };
        let up = !(branches == 0 && offset == 0) as usize;
        Ok(up + self.children(v)?.1)
    }

    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let Vertex::Tree {
            branches,
            path,
            offset,
        } = *v
        else {
            unreachable!()
        };
        let parent = self.parent(branches as usize, path, offset);
        let (kids, nk) = self.children(v)?;
        let j = match parent {
            Some(p) if i == 0 => return Ok(p),
            Some(_) => i - 1,
            None => i,
        };
        if j < nk {
            Ok(kids[j])
        } else {
            Err(Error::UnknownVertex(format!("{v} neighbour {i}")))
        }
    }

    fn contains(&self, v: &Vertex) -> bool {
        let Vertex::Tree {
            branches,
            path,
            offset,
        } = *v
        else {
            return false;
        };
        let k = branches as usize;
        if k > self.levels() || (k < 64 && path >> k != 0) {
            return false;
        }
        let within_segment = if k < self.levels() {
            offset <= self.lengths[k] && (k == 0 || offset >= 1)
        } else {
            k == 0 || offset >= 1
        };
        let d = self.branch_distance[k].saturating_add(offset);
        within_segment && self.max_distance.is_none_or(|m| d <= m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball_region, extract_region, probe_oracle, random_probes};

    #[test]
    fn first_branch_point_has_degree_three() {
        let t = SphericalTreeOracle::new(SphericalTreeSpec::explicit(vec![1, 2, 4])).unwrap();
        assert_eq!(t.degree(&t.root()).unwrap(), 1);
        let bp = t.neighbor(&t.root(), 0).unwrap();
        assert_eq!(t.distance(&bp).unwrap(), 1);
        assert_eq!(t.degree(&bp).unwrap(), 3);
        assert_eq!(t.branch_count(&bp).unwrap(), 0);
        let kids = t.neighbors(&bp).unwrap();
        assert_eq!(t.branch_count(&kids[1]).unwrap(), 1);
        assert_eq!(t.branches_at_level(&kids[1]).unwrap(), 2);
    }

    #[test]
    fn doubly_exponential_lengths() {
        let t = SphericalTreeOracle::new(SphericalTreeSpec::doubly(2.0, 2)).unwrap();
        assert_eq!(t.segment_length(0), Some(2));
        assert_eq!(t.segment_length(1), Some(16));
        assert_eq!(t.segment_length(2), Some(65536));
        assert_eq!(t.branch_point_distance(2), Some(18));
        assert_eq!(t.max_distance(), Some(65554));
        assert!(SphericalTreeOracle::new(SphericalTreeSpec::doubly(2.0, 3)).is_err());
    }

    #[test]
    fn sphere_doubles_at_each_branch_point() {
        let t = SphericalTreeOracle::new(SphericalTreeSpec::explicit(vec![2, 3, 5, 1])).unwrap();
        for n in 0..=4 {
            let a = t.branch_point_distance(n).unwrap();
            assert_eq!(t.sphere_size(a), 1 << n.saturating_sub(1).min(n));
            assert_eq!(t.sphere_size(a + 1), 1 << n);
        }
        // explicit enumeration through the oracle
        let ball = ball_region(&t, t.root(), 20, 10_000).unwrap();
        let g = extract_region(&t, &ball, 10_000).unwrap();
        for m in 0..=20u32 {
            let count = (0..g.len()).filter(|&i| g.distance(i) == m).count() as u64;
            assert_eq!(count, t.sphere_size(m as u64), "distance {m}");
        }
    }

    #[test]
    fn ball_to_first_branch_point() {
        let t = SphericalTreeOracle::new(SphericalTreeSpec::explicit(vec![3, 2])).unwrap();
        let a1 = t.branch_point_distance(1).unwrap();
        let ball = ball_region(&t, t.root(), a1, 100).unwrap();
        let g = extract_region(&t, &ball, 100).unwrap();
        assert_eq!(g.interior_count() as u64, a1 + 1);
        assert_eq!(g.boundary().len(), 2);
    }

    #[test]
    fn cap_is_reported_on_access() {
        let t = SphericalTreeOracle::new(SphericalTreeSpec {
            lengths: BranchLengths::Explicit {
                lengths: vec![1, 1, 1],
            },
            depth_cap: 1,
        })
        .unwrap();
        assert_eq!(t.max_distance(), Some(2));
        let far = Vertex::Tree {
            branches: 1,
            path: 1,
            offset: 1,
        };
        assert!(matches!(
            t.neighbors(&far),
            Err(Error::DepthCapExceeded { .. })
        ));
    }

    #[test]
    fn oracle_probes() {
        for spec in [
            SphericalTreeSpec::explicit(vec![1, 2, 4]),
            SphericalTreeSpec::explicit(vec![2, 3, 5]),
            SphericalTreeSpec::half_line(),
            SphericalTreeSpec::doubly(1.0, 3),
        ] {
            let t = SphericalTreeOracle::new(spec).unwrap();
            let probes = random_probes(&t, t.root(), 1000, 5);
            probe_oracle(&t, &probes).unwrap();
        }
    }

    #[test]
    fn sphere_growth_is_logarithmic_over_materialized_range() {
        let beta = 2.0;
        let t = SphericalTreeOracle::new(SphericalTreeSpec::doubly(beta, 2)).unwrap();
        let max = t.max_distance().unwrap();
        for m in 3..=max {
            let ratio = t.sphere_size(m) as f64 / (m as f64).ln().powf(1.0 / beta);
            assert!((0.25..=4.0).contains(&ratio), "m={m} ratio={ratio}");
        }
    }
}

use super::{FiniteGraph, NeighborOracle, Vertex};
use crate::{Error, Result};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

/// Default cap on the number of discovered vertices during extraction.
pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;

type Membership = Arc<dyn Fn(&Vertex) -> bool + Send + Sync>;

/// A finite vertex set given by a membership predicate and a root.
#[derive(Clone)]
pub struct FiniteRegion {
    member: Membership,
    root: Vertex,
    label: String,
}

impl fmt::Debug for FiniteRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRegion")
            .field("root", &self.root)
            .field("label", &self.label)
            .finish()
    }
}

impl FiniteRegion {
    pub fn new<F>(root: Vertex, label: impl Into<String>, member: F) -> Self
    where
        F: Fn(&Vertex) -> bool + Send + Sync + 'static,
    {
        FiniteRegion {
            member: Arc::new(member),
            root,
            label: label.into(),
        }
    }

    pub fn from_set(root: Vertex, label: impl Into<String>, set: HashSet<Vertex>) -> Self {
        Self::new(root, label, move |v| set.contains(v))
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        (self.member)(v)
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same membership with a different root.
    pub fn rooted_at(&self, root: Vertex) -> Self {
        FiniteRegion {
            member: self.member.clone(),
            root,
            label: self.label.clone(),
        }
    }
}

/// Materialises `region` together with its outer vertex boundary.
///
/// Vertices are indexed in breadth-first discovery order from the root,
/// visiting neighbours in oracle order. Boundary vertices keep only their
/// edges into the region.
pub fn extract_region<O: NeighborOracle + ?Sized>(
    oracle: &O,
    region: &FiniteRegion,
    cap: usize,
) -> Result<FiniteGraph> {
    let root = region.root();
    if !region.contains(&root) {
        return Err(Error::DisconnectedRoot(root.to_string()));
    }
    let mut index: HashMap<Vertex, usize> = HashMap::new();
    let mut vertices = vec![root];
    let mut interior = vec![true];
    let mut distance = vec![0u32];
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new()];
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let v = vertices[i];
        let nbrs = oracle.neighbors(&v)?;
        let mut adj = Vec::with_capacity(nbrs.len());
        for u in nbrs {
            let j = match index.get(&u) {
                Some(&j) => j,
                None => {
                    if vertices.len() >= cap {
                        return Err(Error::RegionExplosion { cap });
                    }
                    let j = vertices.len();
                    let inside = region.contains(&u);
                    vertices.push(u);
                    interior.push(inside);
                    distance.push(distance[i] + 1);
                    adjacency.push(Vec::new());
                    index.insert(u, j);
                    if inside {
                        queue.push_back(j);
                    }
                    j
                }
            };
            adj.push(j as u32);
            if !interior[j] {
                adjacency[j].push(i as u32);
            }
        }
        adjacency[i] = adj;
    }
    Ok(FiniteGraph::from_parts(
        oracle.family(),
        region.label().to_string(),
        vertices,
        adjacency,
        interior,
        distance,
        0,
        index,
    ))
}

/// The ball `{v : d(o, v) <= r}` computed by breadth-first search.
pub fn ball_region<O: NeighborOracle + ?Sized>(
    oracle: &O,
    o: Vertex,
    r: u64,
    cap: usize,
) -> Result<FiniteRegion> {
    let mut seen: HashMap<Vertex, u64> = HashMap::from([(o, 0)]);
    let mut queue = VecDeque::from([o]);
    while let Some(v) = queue.pop_front() {
        let d = seen[&v];
        if d == r {
            continue;
        }
        for u in oracle.neighbors(&v)? {
            if !seen.contains_key(&u) {
                if seen.len() >= cap {
                    return Err(Error::RegionExplosion { cap });
                }
                seen.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    let set: HashSet<Vertex> = seen.into_keys().collect();
    Ok(FiniteRegion::from_set(o, format!("ball(r={r})"), set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LatticeOracle;

    #[test]
    fn line_slab_has_two_boundary_points() {
        let z = LatticeOracle::line();
        let region = FiniteRegion::new(Vertex::lattice(0, 0), "slab", |v| match v {
            Vertex::Lattice { x, .. } => x.abs() <= 1,
            _ => false,
        });
        let g = extract_region(&z, &region, 100).unwrap();
        assert_eq!(g.interior_count(), 3);
        let mut b: Vec<_> = g.boundary().iter().map(|&i| g.vertex(i)).collect();
        b.sort();
        assert_eq!(b, vec![Vertex::lattice(-2, 0), Vertex::lattice(2, 0)]);
    }

    #[test]
    fn nonmember_root_is_rejected() {
        let z = LatticeOracle::line();
        let region = FiniteRegion::new(Vertex::lattice(0, 0), "empty", |_| false);
        assert!(matches!(
            extract_region(&z, &region, 100),
            Err(Error::DisconnectedRoot(_))
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let z = LatticeOracle::plane();
        let region = ball_region(&z, Vertex::lattice(0, 0), 10, 1000).unwrap();
        assert!(matches!(
            extract_region(&z, &region, 50),
            Err(Error::RegionExplosion { cap: 50 })
        ));
        assert!(ball_region(&z, Vertex::lattice(0, 0), 100, 1000).is_err());
    }

    #[test]
    fn zero_ball_is_the_center() {
        let z = LatticeOracle::line();
        let b = ball_region(&z, Vertex::lattice(0, 0), 0, 10).unwrap();
        assert!(b.contains(&Vertex::lattice(0, 0)));
        assert!(!b.contains(&Vertex::lattice(1, 0)));
        let g = extract_region(&z, &b, 10).unwrap();
        assert_eq!((g.interior_count(), g.len()), (1, 3));
    }
}

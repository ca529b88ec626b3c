use super::Vertex;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Lattice,
    Comb,
    Comb2,
    SphericalTree,
    KestenTree,
    Percolation,
    SpanningTree,
    Explicit,
}

/// Deterministic local adjacency of a (possibly infinite) simple graph.
///
/// Implementations must be symmetric, free of loops and duplicates, and list
/// neighbours in increasing [`Vertex`] order.
pub trait NeighborOracle: Send + Sync {
    fn family(&self) -> FamilyTag;

    fn degree(&self, v: &Vertex) -> Result<usize>;

    /// The `i`-th neighbour of `v` in increasing encoding order.
    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex>;

    fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let d = self.degree(v)?;
        (0..d).map(|i| self.neighbor(v, i)).collect()
    }

    fn contains(&self, v: &Vertex) -> bool;
}

impl<O: NeighborOracle + ?Sized> NeighborOracle for &O {
    fn family(&self) -> FamilyTag {
        (**self).family()
    }
    fn degree(&self, v: &Vertex) -> Result<usize> {
        (**self).degree(v)
    }
    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex> {
        (**self).neighbor(v, i)
    }
    fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        (**self).neighbors(v)
    }
    fn contains(&self, v: &Vertex) -> bool {
        (**self).contains(v)
    }
}

impl<O: NeighborOracle + ?Sized> NeighborOracle for Box<O> {
    fn family(&self) -> FamilyTag {
        (**self).family()
    }
    fn degree(&self, v: &Vertex) -> Result<usize> {
        (**self).degree(v)
    }
    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex> {
        (**self).neighbor(v, i)
    }
    fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        (**self).neighbors(v)
    }
    fn contains(&self, v: &Vertex) -> bool {
        (**self).contains(v)
    }
}

/// ℤ (`dim == 1`) or ℤ² (`dim == 2`) with nearest-neighbour edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeOracle {
    dim: u8,
}

impl LatticeOracle {
    pub fn line() -> Self {
        LatticeOracle { dim: 1 }
    }

    pub fn plane() -> Self {
        LatticeOracle { dim: 2 }
    }

    fn coords(&self, v: &Vertex) -> Result<(i64, i64)> {
        match *v {
            Vertex::Lattice { x, y } if self.dim == 2 || y == 0 => Ok((x, y)),
            _ => Err(Error::UnknownVertex(v.to_string())),
        }
    }
}

impl NeighborOracle for LatticeOracle {
    fn family(&self) -> FamilyTag {
        FamilyTag::Lattice
    }

    fn degree(&self, v: &Vertex) -> Result<usize> {
        self.coords(v)?;
        Ok(2 * self.dim as usize)
    }

    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex> {
        let (x, y) = self.coords(v)?;
        let n = match (self.dim, i) {
            (1, 0) => (x - 1, y),
            (1, 1) => (x + 1, y),
            (2, 0) => (x - 1, y),
            (2, 1) => (x, y - 1),
            (2, 2) => (x, y + 1),
            (2, 3) => (x + 1, y),
            _ => return Err(Error::UnknownVertex(format!("{v} neighbour {i}"))),
        };
        Ok(Vertex::lattice(n.0, n.1))
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.coords(v).is_ok()
    }
}

/// Checks symmetry, determinism, ordering and simplicity of `oracle` at the
/// given probe vertices. Returns a description of the first violation.
pub fn probe_oracle<O: NeighborOracle + ?Sized>(
    oracle: &O,
    probes: &[Vertex],
) -> Result<(), String> {
    for v in probes {
        let a = oracle.neighbors(v).map_err(|e| e.to_string())?;
        let b = oracle.neighbors(v).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("nondeterministic neighbours at {v}"));
        }
        if oracle.degree(v).map_err(|e| e.to_string())? != a.len() {
            return Err(format!("degree mismatch at {v}"));
        }
        if a.is_empty() {
            return Err(format!("isolated vertex {v}"));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("neighbours of {v} not strictly increasing"));
        }
        if a.contains(v) {
            return Err(format!("self-loop at {v}"));
        }
        for u in &a {
            match oracle.neighbors(u) {
                Ok(back) if back.contains(v) => {}
                Ok(_) => return Err(format!("asymmetric edge {v} -> {u}")),
                // neighbours past a depth cap cannot be probed
                Err(Error::DepthCapExceeded { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
/// Random probe helper used by tests: a uniformly random walk of `len` steps
/// from `start`, recording every vertex.
pub(crate) fn random_probes<O: NeighborOracle + ?Sized>(
    oracle: &O,
    start: Vertex,
    len: usize,
    seed: u64,
) -> Vec<Vertex> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![start];
    let mut v = start;
    for _ in 0..len {
        let Ok(d) = oracle.degree(&v) else { break };
        match oracle.neighbor(&v, rng.random_range(0..d)) {
            Ok(u) => {
                v = u;
                out.push(v);
            }
            Err(_) => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_plane_degrees() {
        let z = LatticeOracle::line();
        assert_eq!(z.degree(&Vertex::lattice(5, 0)).unwrap(), 2);
        assert!(z.degree(&Vertex::lattice(5, 1)).is_err());
        let z2 = LatticeOracle::plane();
        assert_eq!(
            z2.neighbors(&Vertex::lattice(0, 0)).unwrap(),
            vec![
                Vertex::lattice(-1, 0),
                Vertex::lattice(0, -1),
                Vertex::lattice(0, 1),
                Vertex::lattice(1, 0)
            ]
        );
    }

    #[test]
    fn lattice_probes_pass() {
        for o in [LatticeOracle::line(), LatticeOracle::plane()] {
            let probes = random_probes(&o, Vertex::lattice(0, 0), 1000, 3);
            probe_oracle(&o, &probes).unwrap();
        }
    }
}

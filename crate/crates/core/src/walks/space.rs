use crate::families::{CombOracle, Profile};
use crate::graph::{FiniteGraph, NeighborOracle, Vertex};
use crate::{Error, Result};
use rand::Rng;

/// State space of a simple random walk.
pub trait WalkSpace: Sync {
    type State: Copy + PartialEq + Send + Sync;

    fn locate(&self, v: &Vertex) -> Result<Self::State>;
    fn vertex(&self, s: Self::State) -> Vertex;
    /// One uniform step, consuming exactly one draw.
    fn step<R: Rng + ?Sized>(&self, s: Self::State, rng: &mut R) -> Result<Self::State>;
    /// False for absorbing states (boundary of a finite graph).
    fn is_interior(&self, _s: Self::State) -> bool {
        true
    }
}

/// Walks on a lazily generated graph.
pub struct OracleSpace<'a, O: NeighborOracle + ?Sized> {
    oracle: &'a O,
}

impl<'a, O: NeighborOracle + ?Sized> OracleSpace<'a, O> {
    pub fn new(oracle: &'a O) -> Self {
        OracleSpace { oracle }
    }
}

impl<O: NeighborOracle + ?Sized> WalkSpace for OracleSpace<'_, O> {
    type State = Vertex;

    fn locate(&self, v: &Vertex) -> Result<Vertex> {
        if self.oracle.contains(v) {
            Ok(*v)
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    fn vertex(&self, s: Vertex) -> Vertex {
        s
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&self, s: Vertex, rng: &mut R) -> Result<Vertex> {
        let d = self.oracle.degree(&s)?;
        self.oracle.neighbor(&s, rng.random_range(0..d))
    }
}

/// Walks on an explicit graph by vertex index; boundary vertices absorb.
pub struct IndexSpace<'a> {
    graph: &'a FiniteGraph,
}

impl<'a> IndexSpace<'a> {
    pub fn new(graph: &'a FiniteGraph) -> Self {
        IndexSpace { graph }
    }

    pub fn graph(&self) -> &FiniteGraph {
        self.graph
    }
}

impl WalkSpace for IndexSpace<'_> {
    type State = u32;

    fn locate(&self, v: &Vertex) -> Result<u32> {
        self.graph
            .index_of(v)
            .map(|i| i as u32)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    fn vertex(&self, s: u32) -> Vertex {
        self.graph.vertex(s as usize)
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&self, s: u32, rng: &mut R) -> Result<u32> {
        let nbrs = self.graph.neighbors(s as usize);
        Ok(nbrs[rng.random_range(0..nbrs.len())])
    }

    fn is_interior(&self, s: u32) -> bool {
        self.graph.is_interior(s as usize)
    }
}

/// Walks on a comb over ℤ without going through `Vertex`. Neighbour order
/// and draws match `OracleSpace` on the same comb, so trajectories agree.
pub struct CombSpace<'a> {
    comb: &'a CombOracle,
}

impl<'a> CombSpace<'a> {
    pub fn new(comb: &'a CombOracle) -> Result<Self> {
        if comb.spec().base_dimension != 1 || matches!(comb.spec().profile, Profile::Full) {
            return Err(Error::InvalidSpec(
                "CombSpace needs a finite-tooth comb over ℤ".into(),
            ));
        }
        Ok(CombSpace { comb })
    }
}

impl WalkSpace for CombSpace<'_> {
    type State = (i64, i64);

    fn locate(&self, v: &Vertex) -> Result<(i64, i64)> {
        match *v {
            Vertex::Comb { x, y } if self.comb.contains(v) => Ok((x, y)),
            _ => Err(Error::UnknownVertex(v.to_string())),
        }
    }

    fn vertex(&self, (x, y): (i64, i64)) -> Vertex {
        Vertex::Comb { x, y }
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&self, (x, y): (i64, i64), rng: &mut R) -> Result<(i64, i64)> {
        let f = self.comb.height(x);
        Ok(if y == 0 {
            if f >= 1 {
                match rng.random_range(0..3u32) {
                    0 => (x - 1, 0),
                    1 => (x, 1),
                    _ => (x + 1, 0),
                }
            } else if rng.random_range(0..2u32) == 0 {
                (x - 1, 0)
            } else {
                (x + 1, 0)
            }
        } else if y < f {
            if rng.random_range(0..2u32) == 0 {
                (x, y - 1)
            } else {
                (x, y + 1)
            }
        } else {
            rng.random_range(0..1u32);
            (x, y - 1)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::CombSpec;
    use crate::walks::RngStream;

    #[test]
    fn comb_space_matches_oracle_space() {
        for alpha in [0.0, 0.5, 1.0, 3.0] {
            let c = CombOracle::new(CombSpec::wedge(alpha)).unwrap();
            let (a, b) = (OracleSpace::new(&c), CombSpace::new(&c).unwrap());
            let mut r1 = RngStream::new(9, 1).lane(0);
            let mut r2 = RngStream::new(9, 1).lane(0);
            let (mut u, mut v) = (Vertex::comb(0, 0), (0, 0));
            for _ in 0..20_000 {
                u = a.step(u, &mut r1).unwrap();
                v = b.step(v, &mut r2).unwrap();
                assert_eq!(u, b.vertex(v));
            }
        }
        assert!(CombSpace::new(&CombOracle::new(CombSpec::full()).unwrap()).is_err());
    }
}

//! Graph representation shared by every family: lazy neighbour oracles for
//! infinite graphs and explicit finite truncations with a marked boundary.

mod finite;
mod oracle;
mod region;
mod vertex;

pub use finite::{FiniteGraph, GraphDocument};
#[cfg(test)]
pub(crate) use oracle::random_probes;
pub use oracle::{probe_oracle, FamilyTag, LatticeOracle, NeighborOracle};
pub use region::{ball_region, extract_region, FiniteRegion, DEFAULT_VERTEX_CAP};
pub use vertex::Vertex;

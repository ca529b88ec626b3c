//! Random-walk collisions on recurrent graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: vertex encodings, lazy neighbour oracles for infinite graphs and
//!   explicit finite truncations with an absorbing boundary.
//! * [`families`]: wedge combs, spherically symmetric trees, Galton-Watson and
//!   Kesten trees, percolation clusters and uniform spanning trees.
//! * [`linalg`]: sparse symmetric factorisation, selected inversion and
//!   conjugate gradients backing the exact computations.
//! * [`potential`]: effective resistance, killed Green kernels and killed
//!   transition densities.
//! * [`criterion`]: the Green-ratio scan and the resistance growth sets `J(λ)`.
//! * [`walks`]: reproducible walk engines, collision counters and the exact
//!   (deterministic) collision oracles.
//! * [`experiments`]: Monte Carlo estimators and the phase-transition
//!   experiments, plus the JSON config runner used by the CLI.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criterion;
pub mod error;
pub mod experiments;
pub mod families;
pub mod graph;
pub mod linalg;
pub mod par;
pub mod potential;
pub mod table;
pub mod walks;

pub use error::{Error, Result};
pub use graph::{FiniteGraph, FiniteRegion, NeighborOracle, Vertex};

//! Constructors and samplers for the graph families.

mod comb;
pub(crate) mod galton_watson;
mod offspring;
mod percolation;
mod spec;
mod tree;
mod ust;

pub use comb::{CombOracle, CombSpec, HeightLaw, Profile};
pub use galton_watson::{
    sample_critical_gw, sample_kesten_tree, HangingTree, KestenConfig, KestenTree,
};
pub use offspring::{OffspringLaw, OffspringSpec};
pub use percolation::{
    largest_cluster, sample_percolation_cluster, BondConfiguration, PercolationCluster,
};
pub use spec::{BuiltFamily, FamilySpec};
pub use tree::{doubly_exponential_length, BranchLengths, SphericalTreeOracle, SphericalTreeSpec};
pub use ust::{sample_ust, sample_ust_grid};

//! JSON family specifications, e.g.
//! `{"family":"comb","profile":{"kind":"power","C":1,"alpha":1.5}}`.

use super::{
    sample_kesten_tree, sample_percolation_cluster, sample_ust, BranchLengths, CombOracle,
    CombSpec, KestenConfig, OffspringLaw, Profile, SphericalTreeOracle, SphericalTreeSpec,
};
use crate::graph::{FiniteGraph, LatticeOracle, NeighborOracle, Vertex};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

fn one() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Lattice {
        #[serde(default = "one")]
        dimension: u8,
    },
    Comb {
        profile: Profile,
        #[serde(default = "one")]
        base_dimension: u8,
    },
    SphericalTree {
        lengths: BranchLengths,
        depth_cap: usize,
    },
    Kesten {
        offspring: OffspringLaw,
        height: usize,
        #[serde(default)]
        subtree_depth_cap: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Percolation {
        p: f64,
        half_width: i64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Ust {
        half_width: i64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// A constructed family: a lazy oracle or an explicitly sampled graph.
pub enum BuiltFamily {
    Oracle {
        oracle: Box<dyn NeighborOracle>,
        root: Vertex,
    },
    Graph(FiniteGraph),
}

impl BuiltFamily {
    pub fn oracle(&self) -> &dyn NeighborOracle {
        match self {
            BuiltFamily::Oracle { oracle, .. } => oracle.as_ref(),
            BuiltFamily::Graph(g) => g,
        }
    }

    pub fn root(&self) -> Vertex {
        match self {
            BuiltFamily::Oracle { root, .. } => *root,
            BuiltFamily::Graph(g) => g.vertex(g.root()),
        }
    }
}

impl FamilySpec {
    pub fn comb(spec: CombSpec) -> Self {
        FamilySpec::Comb {
            profile: spec.profile,
            base_dimension: spec.base_dimension,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            FamilySpec::Kesten { .. } | FamilySpec::Percolation { .. } | FamilySpec::Ust { .. }
        )
    }

    /// Builds the family. Random families use their own `seed` field, falling
    /// back to `default_seed`.
    pub fn build(&self, default_seed: u64, vertex_cap: usize) -> Result<BuiltFamily> {
        match self {
            FamilySpec::Lattice { dimension } => {
                let oracle = match dimension {
                    1 => LatticeOracle::line(),
                    2 => LatticeOracle::plane(),
                    d => {
                        return Err(Error::InvalidSpec(format!(
                            "lattice dimension {d} unsupported"
                        )))
                    }
                };
                Ok(BuiltFamily::Oracle {
                    oracle: Box::new(oracle),
                    root: Vertex::lattice(0, 0),
                })
            }
            FamilySpec::Comb {
                profile,
                base_dimension,
            } => {
                let oracle = CombOracle::new(CombSpec {
                    profile: profile.clone(),
                    base_dimension: *base_dimension,
                })?;
                let root = if *base_dimension == 2 {
                    Vertex::Comb2 { x1: 0, x2: 0, y: 0 }
                } else {
                    Vertex::comb(0, 0)
                };
                Ok(BuiltFamily::Oracle {
                    oracle: Box::new(oracle),
                    root,
                })
            }
            FamilySpec::SphericalTree { lengths, depth_cap } => {
                let oracle = SphericalTreeOracle::new(SphericalTreeSpec {
                    lengths: lengths.clone(),
                    depth_cap: *depth_cap,
                })?;
                let root = oracle.root();
                Ok(BuiltFamily::Oracle {
                    oracle: Box::new(oracle),
                    root,
                })
            }
            FamilySpec::Kesten {
                offspring,
                height,
                subtree_depth_cap,
                seed,
            } => {
                let law = offspring.build()?;
                let cfg = KestenConfig {
                    height: *height,
                    subtree_depth_cap: *subtree_depth_cap,
                    vertex_cap,
                };
                let tree = sample_kesten_tree(&law, &cfg, seed.unwrap_or(default_seed))?;
                Ok(BuiltFamily::Graph(tree.graph))
            }
            FamilySpec::Percolation {
                p,
                half_width,
                seed,
            } => {
                let c = sample_percolation_cluster(*p, *half_width, seed.unwrap_or(default_seed))?;
                Ok(BuiltFamily::Graph(c.graph))
            }
            FamilySpec::Ust { half_width, seed } => Ok(BuiltFamily::Graph(sample_ust(
                *half_width,
                seed.unwrap_or(default_seed),
            )?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comb_spec_json() {
        let s: FamilySpec = serde_json::from_str(
            r#"{"family":"comb","profile":{"kind":"power","C":1,"alpha":1.5}}"#,
        )
        .unwrap();
        assert_eq!(s, FamilySpec::comb(CombSpec::power(1.0, 1.5)));
        let built = s.build(0, 1000).unwrap();
        assert_eq!(built.root(), Vertex::comb(0, 0));
        assert_eq!(built.oracle().degree(&Vertex::comb(1, 0)).unwrap(), 3);
    }

    #[test]
    fn sampler_specs_accept_seeds() {
        let s: FamilySpec =
            serde_json::from_str(r#"{"family":"ust","half_width":1,"seed":7}"#).unwrap();
        let BuiltFamily::Graph(g) = s.build(0, 1000).unwrap() else {
            panic!()
        };
        assert_eq!((g.len(), g.edge_count()), (9, 8));
        let s: FamilySpec =
            serde_json::from_str(r#"{"family":"kesten","offspring":{"kind":"geometric"},"height":10,"subtree_depth_cap":20}"#)
                .unwrap();
        assert!(s.is_random());
        assert!(s.build(3, 100_000).is_ok());
    }

    #[test]
    fn invalid_alpha_is_a_spec_error() {
        let s: FamilySpec = serde_json::from_str(
            r#"{"family":"comb","profile":{"kind":"power","C":1,"alpha":-1}}"#,
        )
        .unwrap();
        let err = s.build(0, 10).err().unwrap();
        assert!(err.is_config_error());
    }
}

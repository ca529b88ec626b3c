//! Critical Galton-Watson processes and Kesten's tree (the critical tree
//! conditioned to survive: a backbone with size-biased branching and
//! independent critical trees hanging off it).

use super::OffspringSpec;
use crate::graph::{FamilyTag, FiniteGraph, Vertex};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generation sizes `(Z_0, ..., Z_n)` of a plain Galton-Watson process.
pub fn sample_critical_gw(
    offspring: &OffspringSpec,
    generations: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    offspring.require_critical()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(gw_generations(offspring, generations, &mut rng))
}

pub(crate) fn gw_generations<R: Rng + ?Sized>(
    offspring: &OffspringSpec,
    generations: usize,
    rng: &mut R,
) -> Vec<u64> {
    let mut sizes = Vec::with_capacity(generations + 1);
    let mut z = 1u64;
    sizes.push(z);
    for _ in 0..generations {
        z = (0..z).map(|_| offspring.sample(rng)).sum();
        sizes.push(z);
    }
    sizes
}

#[derive(Clone, Debug)]
pub struct KestenConfig {
    /// Number of backbone edges.
    pub height: usize,
    /// Hanging trees are cut below this many generations.
    pub subtree_depth_cap: Option<u64>,
    pub vertex_cap: usize,
}

impl KestenConfig {
    pub fn new(height: usize) -> Self {
        KestenConfig {
            height,
            subtree_depth_cap: None,
            vertex_cap: crate::graph::DEFAULT_VERTEX_CAP,
        }
    }
}

/// A critical tree hanging off a backbone vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HangingTree {
    /// Graph index of its root (a child of the backbone vertex).
    pub root: usize,
    /// Number of generations below the root that were reached.
    pub depth: u64,
    /// True when growth stopped at the depth cap with live vertices left.
    pub depth_capped: bool,
}

#[derive(Clone, Debug)]
pub struct KestenTree {
    pub graph: FiniteGraph,
    /// Backbone vertex indices, root first; `height + 1` entries.
    pub backbone: Vec<usize>,
    /// `Y_i`: off-backbone children of backbone vertex `i < height`.
    pub off_backbone: Vec<u64>,
    /// Hanging trees per backbone vertex.
    pub hanging: Vec<Vec<HangingTree>>,
    /// Set when the vertex cap stopped the construction early.
    pub truncated: bool,
}

/// Samples Kesten's tree up to backbone height `config.height`.
pub fn sample_kesten_tree(
    offspring: &OffspringSpec,
    config: &KestenConfig,
    seed: u64,
) -> Result<KestenTree> {
    offspring.require_critical()?;
    let biased = offspring.size_biased()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let height = config.height;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut count = height + 1;
    let backbone: Vec<usize> = (0..=height).collect();
    for i in 0..height {
        edges.push((i, i + 1));
    }
    let mut off_backbone = Vec::with_capacity(height);
    let mut hanging = vec![Vec::new(); height + 1];
    let mut truncated = false;
    for i in 0..height {
        let children = biased.sample(&mut rng).max(1);
        let _continuing = rng.random_range(0..children);
        let y = children - 1;
        off_backbone.push(y);
        for _ in 0..y {
            if count >= config.vertex_cap {
                truncated = true;
                break;
            }
            let root = count;
            count += 1;
            edges.push((i, root));
            let (depth, capped) = grow_hanging(
                offspring,
                root,
                config.subtree_depth_cap,
                config.vertex_cap,
                &mut count,
                &mut edges,
                &mut truncated,
                &mut rng,
            );
            hanging[i].push(HangingTree {
                root,
                depth,
                depth_capped: capped,
            });
        }
    }
    let vertices = (0..count as u64).map(Vertex::index).collect();
    let graph = FiniteGraph::from_edges(
        FamilyTag::KestenTree,
        format!("kesten(height={height})"),
        vertices,
        &edges,
        vec![true; count],
        0,
    )?;
    Ok(KestenTree {
        graph,
        backbone,
        off_backbone,
        hanging,
        truncated,
    })
}

#[allow(clippy::too_many_arguments)]
fn grow_hanging<R: Rng + ?Sized>(
    offspring: &OffspringSpec,
    root: usize,
    depth_cap: Option<u64>,
    vertex_cap: usize,
    count: &mut usize,
    edges: &mut Vec<(usize, usize)>,
    truncated: &mut bool,
    rng: &mut R,
) -> (u64, bool) {
    let mut generation = vec![root];
    let mut depth = 0u64;
    while !generation.is_empty() {
        if depth_cap.is_some_and(|cap| depth >= cap) {
            // one more draw per live vertex decides whether the cut removed anything
            let live = generation.iter().any(|_| offspring.sample(rng) > 0);
            return (depth, live);
        }
        let mut next = Vec::new();
        for &parent in &generation {
            let k = offspring.sample(rng);
            for _ in 0..k {
                if *count >= vertex_cap {
                    *truncated = true;
                    return (depth + (!next.is_empty()) as u64, true);
                }
                edges.push((parent, *count));
                next.push(*count);
                *count += 1;
            }
        }
        if !next.is_empty() {
            depth += 1;
        }
        generation = next;
    }
    (depth, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_process_stops_immediately() {
        let dead = OffspringSpec::from_table(vec![1.0]).unwrap();
        assert!(
            sample_critical_gw(&dead, 3, 0).is_err(),
            "mean 0 is not critical"
        );
        let g = OffspringSpec::geometric_half();
        let z = sample_critical_gw(&g, 10, 4).unwrap();
        assert_eq!(z.len(), 11);
        assert_eq!(z[0], 1);
        assert!(z.windows(2).all(|w| w[0] > 0 || w[1] == 0));
    }

    #[test]
    fn deterministic_offspring_gives_a_path() {
        let one = OffspringSpec::from_table(vec![0.0, 1.0]).unwrap();
        let t = sample_kesten_tree(&one, &KestenConfig::new(25), 9).unwrap();
        assert_eq!(t.graph.len(), 26);
        assert_eq!(t.graph.edge_count(), 25);
        assert!(t.off_backbone.iter().all(|&y| y == 0));
    }

    #[test]
    fn backbone_is_a_simple_path_and_rest_is_finite() {
        let g = OffspringSpec::geometric_half();
        let mut cfg = KestenConfig::new(200);
        cfg.subtree_depth_cap = Some(400);
        let t = sample_kesten_tree(&g, &cfg, 17).unwrap();
        t.graph.validate().unwrap();
        assert_eq!(t.graph.edge_count(), t.graph.len() - 1, "a tree");
        for (k, &b) in t.backbone.iter().enumerate() {
            assert_eq!(t.graph.distance(b) as usize, k);
        }
        let hanging: u64 = t.hanging.iter().map(|h| h.len() as u64).sum();
        assert_eq!(hanging, t.off_backbone.iter().sum::<u64>());
        for h in t.hanging.iter().flatten() {
            assert!(h.depth <= 400);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let g = OffspringSpec::geometric_half();
        let cfg = KestenConfig {
            height: 50,
            subtree_depth_cap: Some(100),
            vertex_cap: 1_000_000,
        };
        let a = sample_kesten_tree(&g, &cfg, 3).unwrap();
        let b = sample_kesten_tree(&g, &cfg, 3).unwrap();
        assert_eq!(a.graph.to_document(), b.graph.to_document());
    }

    #[test]
    fn vertex_cap_flags_truncation() {
        let g = OffspringSpec::geometric_half();
        let cfg = KestenConfig {
            height: 100,
            subtree_depth_cap: None,
            vertex_cap: 150,
        };
        let t = sample_kesten_tree(&g, &cfg, 5).unwrap();
        assert!(t.truncated);
        assert!(t.graph.len() <= 150);
    }
}

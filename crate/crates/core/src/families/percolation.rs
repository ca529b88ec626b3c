//! Bond percolation on the box `[-L, L]²` and extraction of its largest open
//! cluster.

use crate::graph::{FamilyTag, FiniteGraph, Vertex};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Open/closed state of every box edge. Vertex `(x, y)` has index
/// `(y + L) * w + (x + L)` with `w = 2L + 1`.
#[derive(Clone, Debug)]
pub struct BondConfiguration {
    pub half_width: i64,
    /// Edge to `(x + 1, y)`.
    pub right: Vec<bool>,
    /// Edge to `(x, y + 1)`.
    pub up: Vec<bool>,
}

impl BondConfiguration {
    pub fn sample(p: f64, half_width: i64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || half_width < 0 {
            return Err(Error::InvalidSpec(format!(
                "need 0 <= p <= 1 and L >= 0 (p={p}, L={half_width})"
            )));
        }
        let w = (2 * half_width + 1) as usize;
        let n = w * w;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut right = vec![false; n];
        let mut up = vec![false; n];
        for i in 0..n {
            let (col, row) = (i % w, i / w);
            if col + 1 < w {
                right[i] = rng.random::<f64>() < p;
            }
            if row + 1 < w {
                up[i] = rng.random::<f64>() < p;
            }
        }
        Ok(BondConfiguration {
            half_width,
            right,
            up,
        })
    }

    pub fn width(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        let w = self.width();
        Vertex::lattice(
            (i % w) as i64 - self.half_width,
            (i / w) as i64 - self.half_width,
        )
    }

    /// Open neighbours of `i` in lattice order: left, down, up, right.
    pub fn open_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let w = self.width();
        let (col, row) = (i % w, i / w);
        let left = (col > 0 && self.right[i - 1]).then(|| i - 1);
        let down = (row > 0 && self.up[i - w]).then(|| i - w);
        let up = self.up[i].then_some(i + w);
        let right = self.right[i].then_some(i + 1);
        [left, down, up, right].into_iter().flatten()
    }

    /// Cluster labels by union-find; the label of a cluster is its smallest
    /// vertex index.
    pub fn union_find_labels(&self) -> Vec<usize> {
        let w = self.width();
        let n = w * w;
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            if self.right[i] {
                uf.union(i, i + 1);
            }
            if self.up[i] {
                uf.union(i, i + w);
            }
        }
        let mut smallest = vec![usize::MAX; n];
        for i in 0..n {
            let r = uf.find(i);
            smallest[r] = smallest[r].min(i);
        }
        (0..n).map(|i| smallest[uf.find(i)]).collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[derive(Clone, Debug)]
pub struct PercolationCluster {
    pub graph: FiniteGraph,
    /// Cluster size over box size.
    pub density: f64,
    pub box_vertices: usize,
}

/// Largest open cluster of the box, rooted at its member nearest the origin.
/// Equal-size clusters are ordered by their lexicographically smallest vertex.
pub fn sample_percolation_cluster(
    p: f64,
    half_width: i64,
    seed: u64,
) -> Result<PercolationCluster> {
    let bonds = BondConfiguration::sample(p, half_width, seed)?;
    largest_cluster(&bonds)
}

pub fn largest_cluster(bonds: &BondConfiguration) -> Result<PercolationCluster> {
    let labels = bonds.union_find_labels();
    let n = labels.len();
    let mut size = vec![0usize; n];
    let mut least = vec![None::<Vertex>; n];
    for (i, &l) in labels.iter().enumerate() {
        size[l] += 1;
        let v = bonds.vertex(i);
        least[l] = Some(least[l].map_or(v, |u: Vertex| u.min(v)));
    }
    let best = (0..n)
        .filter(|&l| size[l] > 0)
        .max_by(|&a, &b| size[a].cmp(&size[b]).then_with(|| least[b].cmp(&least[a])))
        .expect("box is nonempty");
    if size[best] < 2 {
        return Err(Error::EmptyCluster);
    }
    let members: Vec<usize> = (0..n).filter(|&i| labels[i] == best).collect();
    let root = *members
        .iter()
        .min_by_key(|&&i| {
            let Vertex::Lattice { x, y } = bonds.vertex(i) else {
                unreachable!()
            };
            (x * x + y * y, bonds.vertex(i))
        })
        .expect("cluster nonempty");

    // canonical breadth-first indexing from the root
    let mut order = vec![usize::MAX; n];
    let mut vertices = Vec::with_capacity(members.len());
    let mut queue = VecDeque::from([root]);
    order[root] = 0;
    vertices.push(bonds.vertex(root));
    let mut edges = Vec::new();
    while let Some(i) = queue.pop_front() {
        for j in bonds.open_neighbors(i) {
            if order[j] == usize::MAX {
                order[j] = vertices.len();
                vertices.push(bonds.vertex(j));
                queue.push_back(j);
            }
            if i < j {
                edges.push((order[i], order[j]));
            }
        }
    }
    let count = vertices.len();
    let graph = FiniteGraph::from_edges(
        FamilyTag::Percolation,
        format!("percolation(L={})", bonds.half_width),
        vertices,
        &edges,
        vec![true; count],
        0,
    )?;
    let box_vertices = bonds.width() * bonds.width();
    Ok(PercolationCluster {
        graph,
        density: count as f64 / box_vertices as f64,
        box_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bfs_labels(b: &BondConfiguration) -> Vec<usize> {
        let n = b.width() * b.width();
        let mut label = vec![usize::MAX; n];
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut q = VecDeque::from([s]);
            while let Some(i) = q.pop_front() {
                for j in b.open_neighbors(i) {
                    if label[j] == usize::MAX {
                        label[j] = s;
                        q.push_back(j);
                    }
                }
            }
        }
        label
    }

    #[test]
    fn full_box_at_p_one() {
        let c = sample_percolation_cluster(1.0, 3, 0).unwrap();
        assert_eq!(c.graph.len(), 49);
        assert_eq!(c.graph.vertex(0), Vertex::lattice(0, 0));
        assert_eq!(c.graph.edge_count(), 2 * 7 * 6);
    }

    #[test]
    fn no_open_edge_is_an_error() {
        assert!(matches!(
            sample_percolation_cluster(0.0, 5, 0),
            Err(Error::EmptyCluster)
        ));
    }

    #[test]
    fn union_find_agrees_with_bfs() {
        for seed in 0..5 {
            let b = BondConfiguration::sample(0.5, 20, seed).unwrap();
            assert_eq!(b.union_find_labels(), bfs_labels(&b));
        }
    }

    #[test]
    fn supercritical_density_in_range() {
        let c = sample_percolation_cluster(0.7, 50, 11).unwrap();
        assert!(c.density > 0.5 && c.density < 1.0, "density {}", c.density);
        c.graph.validate().unwrap();
    }
}

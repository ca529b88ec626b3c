//! Uniform spanning trees of grid boxes via Wilson's algorithm.

use crate::graph::{FamilyTag, FiniteGraph, Vertex};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Uniform spanning tree of the `(2L+1)²` box centred at the origin.
pub fn sample_ust(half_width: i64, seed: u64) -> Result<FiniteGraph> {
    if half_width < 1 {
        return Err(Error::InvalidSpec("UST box needs L >= 1".into()));
    }
    sample_ust_grid(
        -half_width..=half_width,
        -half_width..=half_width,
        Vertex::lattice(0, 0),
        seed,
    )
}

/// Uniform spanning tree of the grid `xs × ys`, rooted at `root`.
pub fn sample_ust_grid(
    xs: std::ops::RangeInclusive<i64>,
    ys: std::ops::RangeInclusive<i64>,
    root: Vertex,
    seed: u64,
) -> Result<FiniteGraph> {
    let (x0, y0) = (*xs.start(), *ys.start());
    let w = (xs.end() - x0 + 1).max(0) as usize;
    let h = (ys.end() - y0 + 1).max(0) as usize;
    let n = w * h;
    let Vertex::Lattice { x: rx, y: ry } = root else {
        return Err(Error::InvalidSpec(
            "UST root must be a lattice vertex".into(),
        ));
    };
    if n == 0 || !xs.contains(&rx) || !ys.contains(&ry) {
        return Err(Error::InvalidSpec("UST root outside the grid".into()));
    }
    let coord = |i: usize| Vertex::lattice(x0 + (i % w) as i64, y0 + (i / w) as i64);
    let grid_neighbors = |i: usize| {
        let (c, r) = (i % w, i / w);
        let mut out = [0usize; 4];
        let mut k = 0;
        // lattice order: left, down, up, right
        if c > 0 {
            out[k] = i - 1;
            k += 1;
        }
        if r > 0 {
            out[k] = i - w;
            k += 1;
        }
        if r + 1 < h {
            out[k] = i + w;
            k += 1;
        }
        if c + 1 < w {
            out[k] = i + 1;
            k += 1;
        }
        (out, k)
    };
    let root_idx = (ry - y0) as usize * w + (rx - x0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[root_idx] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let (nb, k) = grid_neighbors(u);
            next[u] = nb[rng.random_range(0..k)];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }

    // breadth-first indexing from the root
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        if u != root_idx {
            adj[u].push(next[u]);
            adj[next[u]].push(u);
        }
    }
    let mut order = vec![usize::MAX; n];
    let mut vertices = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    order[root_idx] = 0;
    vertices.push(coord(root_idx));
    let mut queue = VecDeque::from([root_idx]);
    while let Some(u) = queue.pop_front() {
        let mut nbrs = adj[u].clone();
        nbrs.sort_by_key(|&j| coord(j));
        for j in nbrs {
            if order[j] == usize::MAX {
                order[j] = vertices.len();
                vertices.push(coord(j));
                edges.push((order[u], order[j]));
                queue.push_back(j);
            }
        }
    }
    FiniteGraph::from_edges(
        FamilyTag::SpanningTree,
        format!("ust({w}x{h})"),
        vertices,
        &edges,
        vec![true; n],
        0,
    )
}

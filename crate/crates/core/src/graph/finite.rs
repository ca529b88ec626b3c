use super::{FamilyTag, NeighborOracle, Vertex};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// An explicit finite graph: a region (interior) plus its absorbing
/// boundary, or a whole sampled graph with every vertex interior.
///
/// Adjacency is stored in compressed rows. Interior vertices carry their full
/// oracle degree; boundary vertices only list their interior neighbours.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    family: FamilyTag,
    label: String,
    vertices: Vec<Vertex>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    interior: Vec<bool>,
    distance: Vec<u32>,
    root: usize,
    index: HashMap<Vertex, usize>,
}

/// JSON form of a [`FiniteGraph`]; edges sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub family: FamilyTag,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[usize; 2]>,
    pub interior: Vec<bool>,
    pub root: usize,
}

impl FiniteGraph {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        family: FamilyTag,
        label: String,
        vertices: Vec<Vertex>,
        adjacency: Vec<Vec<u32>>,
        interior: Vec<bool>,
        distance: Vec<u32>,
        root: usize,
        index: HashMap<Vertex, usize>,
    ) -> Self {
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        for adj in &adjacency {
            targets.extend_from_slice(adj);
            offsets.push(targets.len());
        }
        FiniteGraph {
            family,
            label,
            vertices,
            offsets,
            targets,
            interior,
            distance,
            root,
            index,
        }
    }

    /// Builds a graph from an undirected edge list. Neighbour lists are sorted
    /// by vertex encoding; loops and duplicate edges are rejected.
    pub fn from_edges(
        family: FamilyTag,
        label: impl Into<String>,
        vertices: Vec<Vertex>,
        edges: &[(usize, usize)],
        interior: Vec<bool>,
        root: usize,
    ) -> Result<Self> {
        let n = vertices.len();
        if interior.len() != n || root >= n {
            return Err(Error::InvalidSpec(
                "vertex, interior and root sizes disagree".into(),
            ));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(*v, i).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate vertex {v}")));
            }
        }
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidSpec(format!("bad edge ({a},{b})")));
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        for adj in adjacency.iter_mut() {
            adj.sort_by_key(|&j| vertices[j as usize]);
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSpec("duplicate edge".into()));
            }
        }
        let mut distance = vec![u32::MAX; n];
        distance[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                let j = j as usize;
                if distance[j] == u32::MAX {
                    distance[j] = distance[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        Ok(Self::from_parts(
            family,
            label.into(),
            vertices,
            adjacency,
            interior,
            distance,
            root,
            index,
        ))
    }

    /// A graph on `Vertex::Index` vertices, all interior.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        let vertices = (0..n as u64).map(Vertex::index).collect();
        Self::from_edges(
            FamilyTag::Explicit,
            "explicit",
            vertices,
            edges,
            vec![true; n],
            root,
        )
    }

    /// Copy of this graph with a different interior mask.
    pub fn with_interior(&self, interior: Vec<bool>) -> Result<Self> {
        if interior.len() != self.len() {
            return Err(Error::InvalidSpec("interior mask has wrong length".into()));
        }
        let mut g = self.clone();
        g.interior = interior;
        Ok(g)
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    #[inline]
    pub fn is_interior(&self, i: usize) -> bool {
        self.interior[i]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    /// Breadth-first distance from the root (`u32::MAX` if unreachable).
    pub fn distance(&self, i: usize) -> u32 {
        self.distance[i]
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.interior[i]).collect()
    }

    pub fn boundary(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.interior[i]).collect()
    }

    pub fn max_interior_degree(&self) -> usize {
        (0..self.len())
            .filter(|&i| self.interior[i])
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|i| {
                self.neighbors(i)
                    .iter()
                    .map(move |&j| (i, j as usize))
                    .filter(|&(i, j)| i < j)
            })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Checks the structural invariants: symmetric simple adjacency, every
    /// boundary vertex attached to the interior, interior connected from the
    /// root.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.len();
        for i in 0..n {
            let adj = self.neighbors(i);
            for &j in adj {
                let j = j as usize;
                if j == i {
                    return Err(format!("loop at {i}"));
                }
                if self.interior[i] || self.interior[j] {
                    let back = self
                        .neighbors(j)
                        .iter()
                        .filter(|&&k| k as usize == i)
                        .count();
                    if back != 1 {
                        return Err(format!("asymmetric edge {i}-{j}"));
                    }
                }
            }
            let mut sorted = adj.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("duplicate neighbour at {i}"));
            }
            if !self.interior[i] && !adj.iter().any(|&j| self.interior[j as usize]) {
                return Err(format!("boundary vertex {i} has no interior neighbour"));
            }
        }
        if !self.interior[self.root] {
            return Err("root is not interior".into());
        }
        let mut seen = vec![false; n];
        seen[self.root] = true;
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            for &j in self.neighbors(i) {
                let j = j as usize;
                if self.interior[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if (0..n).any(|i| self.interior[i] && !seen[i]) {
            return Err("interior not connected from the root".into());
        }
        Ok(())
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            family: self.family,
            vertices: self.vertices.clone(),
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
            interior: self.interior.clone(),
            root: self.root,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_document())?)
    }

    /// Rebuilds a graph from its document. Neighbour order follows encoding
    /// order, so documents produced from oracle extractions round-trip.
    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(
            doc.family,
            "document",
            doc.vertices.clone(),
            &edges,
            doc.interior.clone(),
            doc.root,
        )
    }
}

impl NeighborOracle for FiniteGraph {
    fn family(&self) -> FamilyTag {
        self.family
    }

    fn degree(&self, v: &Vertex) -> Result<usize> {
        let i = self
            .index_of(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        Ok(FiniteGraph::degree(self, i))
    }

    fn neighbor(&self, v: &Vertex, k: usize) -> Result<Vertex> {
        let i = self
            .index_of(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        let mut nbrs: Vec<Vertex> = FiniteGraph::neighbors(self, i)
            .iter()
            .map(|&j| self.vertices[j as usize])
            .collect();
        nbrs.sort_unstable();
        nbrs.get(k)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(format!("{v} neighbour {k}")))
    }

    fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let i = self
            .index_of(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        let mut nbrs: Vec<Vertex> = FiniteGraph::neighbors(self, i)
            .iter()
            .map(|&j| self.vertices[j as usize])
            .collect();
        nbrs.sort_unstable();
        Ok(nbrs)
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_document_round_trip() {
        let g = FiniteGraph::from_index_edges(3, &[(0, 1), (1, 2), (2, 0)], 0).unwrap();
        g.validate().unwrap();
        let doc = g.to_document();
        assert_eq!(doc.edges, vec![[0, 1], [0, 2], [1, 2]]);
        let json = g.to_json().unwrap();
        let back: GraphDocument = serde_json::from_str(&json).unwrap();
        let h = FiniteGraph::from_document(&back).unwrap();
        assert_eq!(h.to_document(), doc);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(FiniteGraph::from_index_edges(2, &[(0, 0)], 0).is_err());
        assert!(FiniteGraph::from_index_edges(2, &[(0, 1), (1, 0)], 0).is_err());
    }

    #[test]
    fn finite_graph_is_an_oracle() {
        let g = FiniteGraph::from_index_edges(3, &[(0, 1), (1, 2)], 0).unwrap();
        let n = NeighborOracle::neighbors(&g, &Vertex::index(1)).unwrap();
        assert_eq!(n, vec![Vertex::index(0), Vertex::index(2)]);
        crate::graph::probe_oracle(&g, g.vertices()).unwrap();
    }
}

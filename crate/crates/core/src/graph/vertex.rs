use serde::{Deserialize, Serialize};
use std::fmt;

/// Canonical vertex encoding. Two values are equal iff they denote the same
/// vertex of the owning family. The derived order is the lexicographic order
/// of encodings, which fixes neighbour order everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Vertex {
    /// Comb over ℤ: spine coordinate `x`, height `y` (negative heights only
    /// occur on the full comb).
    Comb { x: i64, y: i64 },
    /// Comb over ℤ²: spine coordinates `(x1, x2)`, height `y`.
    Comb2 { x1: i64, x2: i64, y: i64 },
    /// Spherically symmetric binary tree. `branches` branch points lie
    /// strictly before the vertex; bit `i` of `path` is the child taken at
    /// branch point `i + 1`; `offset` is the distance past the last branch
    /// point passed (past the root when `branches == 0`).
    Tree {
        branches: u8,
        path: u64,
        offset: u64,
    },
    /// ℤ² lattice point (`y == 0` for ℤ).
    Lattice { x: i64, y: i64 },
    /// Vertex of an explicitly sampled finite graph.
    Index { index: u64 },
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Vertex::Comb { x, y } => write!(f, "({x},{y})"),
            Vertex::Comb2 { x1, x2, y } => write!(f, "({x1},{x2},{y})"),
            Vertex::Tree {
                branches,
                path,
                offset,
            } => {
                write!(f, "t[")?;
                for i in 0..branches {
                    write!(f, "{}", (path >> i) & 1)?;
                }
                write!(f, "]+{offset}")
            }
            Vertex::Lattice { x, y } => write!(f, "<{x},{y}>"),
            Vertex::Index { index } => write!(f, "#{index}"),
        }
    }
}

impl Vertex {
    pub const fn comb(x: i64, y: i64) -> Self {
        Vertex::Comb { x, y }
    }

    pub const fn lattice(x: i64, y: i64) -> Self {
        Vertex::Lattice { x, y }
    }

    pub const fn index(index: u64) -> Self {
        Vertex::Index { index }
    }
}

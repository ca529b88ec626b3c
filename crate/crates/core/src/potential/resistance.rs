use super::{DIRECT_SOLVE_LIMIT, RESIDUAL_TOLERANCE};
use crate::graph::FiniteGraph;
use crate::linalg::{conjugate_gradient, residual_max_norm, LdlFactor, SymmetricMatrix};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resistance {
    pub resistance: f64,
    /// Max-norm residual of the Dirichlet solve.
    pub residual: f64,
}

/// Solves `L h = b` on the free vertices; picks the direct or iterative path
/// by size and returns the solution with its max-norm residual.
pub(crate) fn solve_spd(a: &SymmetricMatrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if a.dim() == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let x = if a.dim() <= DIRECT_SOLVE_LIMIT {
        LdlFactor::factor(a)?.solve(b)
    } else {
        let out = conjugate_gradient(a, b, 1e-10, 100_000);
        if !out.converged {
            return Err(Error::NotConverged {
                residual: out.relative_residual,
            });
        }
        out.solution
    };
    let r = residual_max_norm(a, &x, b);
    if !(r <= RESIDUAL_TOLERANCE) {
        return Err(Error::NotConverged { residual: r });
    }
    Ok((x, r))
}

/// Effective resistance between vertex sets `a` and `b` with unit
/// conductances on every stored edge.
pub fn effective_resistance(g: &FiniteGraph, a: &[usize], b: &[usize]) -> Result<Resistance> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Disjointness(
            "both vertex sets must be nonempty".into(),
        ));
    }
    let n = g.len();
    // 0 = free, 1 = in A, 2 = in B
    let mut class = vec![0u8; n];
    for &v in a {
        if v >= n {
            return Err(Error::UnknownVertex(format!("index {v}")));
        }
        class[v] = 1;
    }
    for &v in b {
        if v >= n {
            return Err(Error::UnknownVertex(format!("index {v}")));
        }
        if class[v] == 1 {
            return Err(Error::Disjointness(format!(
                "vertex {} lies in both sets",
                g.vertex(v)
            )));
        }
        class[v] = 2;
    }
    let mut local = vec![u32::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if class[v] == 0 {
            local[v] = free.len() as u32;
            free.push(v);
        }
    }
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; free.len()];
    for (i, &v) in free.iter().enumerate() {
        triplets.push((i, i, g.degree(v) as f64));
        for &w in g.neighbors(v) {
            let w = w as usize;
            match class[w] {
                0 if local[w] as usize > i => triplets.push((i, local[w] as usize, -1.0)),
                1 => rhs[i] += 1.0,
                _ => {}
            }
        }
    }
    let m = SymmetricMatrix::from_triplets(free.len(), &triplets);
    let (h, residual) = solve_spd(&m, &rhs).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!(
            "a component of the graph touches neither set ({msg})"
        )),
        e => e,
    })?;
    let potential = |w: usize| match class[w] {
        0 => h[local[w] as usize],
        1 => 1.0,
        _ => 0.0,
    };
    let mut current = 0.0;
    for &v in a {
        for &w in g.neighbors(v) {
            current += 1.0 - potential(w as usize);
        }
    }
    if !(current > 0.0) {
        return Err(Error::Singular("no current flows between the sets".into()));
    }
    Ok(Resistance {
        resistance: 1.0 / current,
        residual,
    })
}

/// Resistance from `o` to the boundary on a graph whose interior is a tree,
/// by the series/parallel recursion. Returns `None` if the interior contains
/// a cycle.
pub fn tree_resistance_to_boundary(g: &FiniteGraph, o: usize) -> Option<f64> {
    let n = g.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![o];
    parent[o] = o;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        if !g.is_interior(v) {
            continue;
        }
        for &w in g.neighbors(v) {
            let w = w as usize;
            if w == parent[v] {
                continue;
            }
            if parent[w] != usize::MAX {
                return None;
            }
            parent[w] = v;
            order.push(w);
        }
    }
    // conductance from each vertex down into its subtree to the boundary
    let mut cond = vec![0.0f64; n];
    for &v in order.iter().rev() {
        if !g.is_interior(v) {
            cond[v] = f64::INFINITY;
            continue;
        }
        let mut c = 0.0;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if w == parent[v] && v != o {
                continue;
            }
            // one unit resistor in series with the child's subtree
            c += if cond[w].is_infinite() {
                1.0
            } else {
                cond[w] / (1.0 + cond[w])
            };
        }
        cond[v] = c;
    }
    (cond[o] > 0.0).then(|| 1.0 / cond[o])
}

use super::resistance::effective_resistance;
use super::{DIRECT_SOLVE_LIMIT, RESIDUAL_TOLERANCE};
use crate::graph::{FiniteGraph, Vertex};
use crate::linalg::{conjugate_gradient, residual_max_norm, LdlFactor, SymmetricMatrix};
use crate::table::to_csv_with_header;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct GreenOptions {
    /// Compute `g_B(v,v)` for every interior `v` (direct solver only).
    pub diagonal: bool,
    /// Extra vertex pairs whose effective resistance is reported.
    pub pairs: Vec<(usize, usize)>,
    /// Compare `g_B(o,o)` with an independent resistance solve.
    pub cross_check: bool,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions {
            diagonal: true,
            pairs: Vec::new(),
            cross_check: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenEntry {
    pub index: usize,
    pub vertex: Vertex,
    pub g_diag: Option<f64>,
    pub g_root_row: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResistance {
    pub u: usize,
    pub v: usize,
    pub resistance: f64,
}

/// Green kernel of the walk killed on leaving the interior, seen from `root`.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialReport {
    pub label: String,
    pub root: usize,
    pub root_vertex: Vertex,
    pub interior_count: usize,
    /// Interior vertices in graph index order.
    pub entries: Vec<GreenEntry>,
    /// `g_B(o,o)`.
    pub green_root: f64,
    /// `R_eff(o, B^c)` from a separate Dirichlet solve (equal to
    /// `green_root` unless the cross-check was disabled, then `NaN`).
    pub resistance_root: f64,
    pub resistance_pairs: Vec<PairResistance>,
    /// Largest max-norm residual over all solves.
    pub solver_residual: f64,
    pub method: &'static str,
}

impl PotentialReport {
    /// Largest diagonal value, if the diagonal was computed.
    pub fn max_diagonal(&self) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.g_diag)
            .try_fold(f64::MIN, |m, d| d.map(|d| m.max(d)))
    }

    pub fn diagonal(&self, v: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.index == v)
            .and_then(|e| e.g_diag)
    }

    /// CSV with columns `vertex,g_diag,g_root_row`.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row {
            vertex: String,
            g_diag: Option<f64>,
            g_root_row: f64,
        }
        let rows: Vec<Row> = self
            .entries
            .iter()
            .map(|e| Row {
                vertex: e.vertex.to_string(),
                g_diag: e.g_diag,
                g_root_row: e.g_root_row,
            })
            .collect();
        to_csv_with_header(&["vertex", "g_diag", "g_root_row"], &rows)
    }

    /// JSON summary without the per-vertex table.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "root": self.root_vertex,
            "interior_count": self.interior_count,
            "green_root": self.green_root,
            "resistance_root": self.resistance_root,
            "resistance_pairs": self.resistance_pairs,
            "solver_residual": self.solver_residual,
            "method": self.method,
        })
    }
}

/// Killed Laplacian `D - A` on the interior, in interior-local indexing.
pub(crate) fn killed_laplacian(g: &FiniteGraph) -> (SymmetricMatrix, Vec<usize>, Vec<u32>) {
    let interior = g.interior_indices();
    let mut local = vec![u32::MAX; g.len()];
    for (i, &v) in interior.iter().enumerate() {
        local[v] = i as u32;
    }
    let mut triplets = Vec::with_capacity(interior.len() * 3);
    for (i, &v) in interior.iter().enumerate() {
        triplets.push((i, i, g.degree(v) as f64));
        for &w in g.neighbors(v) {
            let l = local[w as usize];
            if l != u32::MAX && (l as usize) > i {
                triplets.push((i, l as usize, -1.0));
            }
        }
    }
    (
        SymmetricMatrix::from_triplets(interior.len(), &triplets),
        interior,
        local,
    )
}

pub fn green_kernel(g: &FiniteGraph, o: usize) -> Result<PotentialReport> {
    green_kernel_with(g, o, &GreenOptions::default())
}

pub fn green_kernel_with(
    g: &FiniteGraph,
    o: usize,
    options: &GreenOptions,
) -> Result<PotentialReport> {
    if o >= g.len() || !g.is_interior(o) {
        return Err(Error::InvalidSpec(format!(
            "green kernel root {o} is not interior"
        )));
    }
    let (lap, interior, local) = killed_laplacian(g);
    let n = interior.len();
    let lo = local[o] as usize;
    let mut e = vec![0.0; n];
    e[lo] = 1.0;
    let (row, diag, mut residual, method) = if n <= DIRECT_SOLVE_LIMIT {
        let f = LdlFactor::factor(&lap)?;
        let row = f.solve(&e);
        let diag = options.diagonal.then(|| f.inverse_diagonal());
        let r = residual_max_norm(&lap, &row, &e);
        (row, diag, r, "direct")
    } else {
        let out = conjugate_gradient(&lap, &e, 1e-10, 100_000);
        if !out.converged {
            return Err(Error::NotConverged {
                residual: out.relative_residual,
            });
        }
        let r = residual_max_norm(&lap, &out.solution, &e);
        (out.solution, None, r, "cg")
    };
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::NotConverged { residual });
    }
    let green_root = row[lo];
    if let Some(d) = &diag {
        let gap = (d[lo] - green_root).abs();
        if gap > RESIDUAL_TOLERANCE * green_root.max(1.0) {
            return Err(Error::NotConverged { residual: gap });
        }
    }
    let resistance_root = if options.cross_check {
        let r = effective_resistance(g, &[o], &g.boundary())?;
        residual = residual.max(r.residual);
        let gap = (r.resistance - green_root).abs();
        if gap > RESIDUAL_TOLERANCE * green_root.max(1.0) {
            return Err(Error::NotConverged { residual: gap });
        }
        r.resistance
    } else {
        f64::NAN
    };
    let mut resistance_pairs = Vec::with_capacity(options.pairs.len());
    for &(u, v) in &options.pairs {
        let r = effective_resistance(g, &[u], &[v])?;
        residual = residual.max(r.residual);
        resistance_pairs.push(PairResistance {
            u,
            v,
            resistance: r.resistance,
        });
    }
    let entries = interior
        .iter()
        .enumerate()
        .map(|(i, &v)| GreenEntry {
            index: v,
            vertex: g.vertex(v),
            g_diag: diag.as_ref().map(|d| d[i]),
            g_root_row: row[i],
        })
        .collect();
    Ok(PotentialReport {
        label: g.label().to_string(),
        root: o,
        root_vertex: g.vertex(o),
        interior_count: n,
        entries,
        green_root,
        resistance_root,
        resistance_pairs,
        solver_residual: residual,
        method,
    })
}

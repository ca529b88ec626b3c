use super::SymmetricMatrix;
use crate::{Error, Result};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// `P A Pᵀ = L D Lᵀ` with `L` unit lower triangular, computed in a
/// minimum-degree elimination order. The filled pattern of each column is
/// recorded during ordering, so numeric factorisation needs no symbolic pass.
#[derive(Clone, Debug)]
pub struct LdlFactor {
    n: usize,
    /// `order[k]` is the original index eliminated at step `k`.
    order: Vec<usize>,
    /// Elimination step of each original index.
    rank: Vec<usize>,
    /// Sorted ranks `> k` of the nonzeros in column `k` of `L`.
    col_rows: Vec<Vec<u32>>,
    col_vals: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

fn merge_into(target: &mut Vec<u32>, add: &[u32], skip: u32) {
    let mut out = Vec::with_capacity(target.len() + add.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < add.len() {
        let next = match (target.get(i), add.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                a
            }
            (Some(_), Some(&b)) | (None, Some(&b)) => {
                j += 1;
                b
            }
            (Some(&a), None) => {
                i += 1;
                a
            }
            (None, None) => unreachable!(),
        };
        if next != skip {
            out.push(next);
        }
    }
    *target = out;
}

impl LdlFactor {
    pub fn factor(a: &SymmetricMatrix) -> Result<Self> {
        let n = a.dim();
        let (order, pattern) = minimum_degree(a);
        let mut rank = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        let col_rows: Vec<Vec<u32>> = (0..n)
            .map(|k| {
                let mut r: Vec<u32> = pattern[order[k]]
                    .iter()
                    .map(|&v| rank[v as usize] as u32)
                    .collect();
                r.sort_unstable();
                r
            })
            .collect();
        let mut col_vals: Vec<Vec<f64>> = col_rows.iter().map(|r| vec![0.0; r.len()]).collect();
        let mut diag = vec![0.0; n];
        let mut scale = 0.0f64;
        for i in 0..n {
            let ri = rank[i];
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let rj = rank[j as usize];
                if rj == ri {
                    diag[ri] += v;
                    scale = scale.max(v.abs());
                } else if rj > ri {
                    let pos = col_rows[ri]
                        .binary_search(&(rj as u32))
                        .expect("matrix pattern lies inside the filled pattern");
                    col_vals[ri][pos] += v;
                }
            }
        }
        let tiny = 1e-13 * scale.max(f64::MIN_POSITIVE);
        for k in 0..n {
            let d = diag[k];
            if !(d > tiny) {
                return Err(Error::Singular(format!(
                    "pivot {d:e} at elimination step {k} (original index {})",
                    order[k]
                )));
            }
            let rows = &col_rows[k];
            let s = std::mem::take(&mut col_vals[k]);
            let l: Vec<f64> = s.iter().map(|v| v / d).collect();
            for (ai, &i) in rows.iter().enumerate() {
                let i = i as usize;
                diag[i] -= l[ai] * s[ai];
                if ai + 1 < rows.len() {
                    let target_rows = &col_rows[i];
                    let target = &mut col_vals[i];
                    let mut pos = 0;
                    for (bj, &j) in rows.iter().enumerate().skip(ai + 1) {
                        // rows are sorted, so positions only move forward
                        pos += target_rows[pos..]
                            .binary_search(&j)
                            .expect("elimination clique lies inside the filled pattern");
                        target[pos] -= l[bj] * s[ai];
                    }
                }
            }
            col_vals[k] = l;
        }
        Ok(LdlFactor {
            n,
            order,
            rank,
            col_rows,
            col_vals,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of `L` below the diagonal.
    pub fn fill(&self) -> usize {
        self.col_rows.iter().map(Vec::len).sum()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = (0..self.n).map(|k| b[self.order[k]]).collect();
        for k in 0..self.n {
            let yk = y[k];
            for (&i, &l) in self.col_rows[k].iter().zip(&self.col_vals[k]) {
                y[i as usize] -= l * yk;
            }
        }
        for k in 0..self.n {
            y[k] /= self.diag[k];
        }
        for k in (0..self.n).rev() {
            let mut acc = y[k];
            for (&i, &l) in self.col_rows[k].iter().zip(&self.col_vals[k]) {
                acc -= l * y[i as usize];
            }
            y[k] = acc;
        }
        let mut x = vec![0.0; self.n];
        for k in 0..self.n {
            x[self.order[k]] = y[k];
        }
        x
    }

    /// Diagonal of `A⁻¹` by selected inversion on the filled pattern.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let mut zcol: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut zdiag = vec![0.0; n];
        for k in (0..n).rev() {
            let rows = &self.col_rows[k];
            let l = &self.col_vals[k];
            let mut zk = vec![0.0; rows.len()];
            for (a, &j) in rows.iter().enumerate() {
                let mut acc = 0.0;
                for (b, &i) in rows.iter().enumerate() {
                    let zji = if i == j {
                        zdiag[j as usize]
                    } else {
                        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                        let pos = self.col_rows[lo as usize]
                            .binary_search(&hi)
                            .expect("selected entry lies inside the filled pattern");
                        zcol[lo as usize][pos]
                    };
                    acc += l[b] * zji;
                }
                zk[a] = -acc;
            }
            zdiag[k] = 1.0 / self.diag[k] - l.iter().zip(&zk).map(|(p, q)| p * q).sum::<f64>();
            zcol[k] = zk;
        }
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.order[k]] = zdiag[k];
        }
        out
    }

    /// Elimination step of original index `i`.
    pub fn rank(&self, i: usize) -> usize {
        self.rank[i]
    }
}

/// Minimum-degree ordering by explicit elimination. Returns the order and,
/// for each original vertex, its uneliminated neighbours at elimination time
/// (the structure of its column of `L`). Ties break on the smaller index.
fn minimum_degree(a: &SymmetricMatrix) -> (Vec<usize>, Vec<Vec<u32>>) {
    let n = a.dim();
    let mut adj: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            a.row(i)
                .0
                .iter()
                .copied()
                .filter(|&j| j as usize != i)
                .collect()
        })
        .collect();
    let mut eliminated = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|i| Reverse((adj[i].len(), i))).collect();
    let mut order = Vec::with_capacity(n);
    let mut pattern: Vec<Vec<u32>> = vec![Vec::new(); n];
    while let Some(Reverse((deg, v))) = heap.pop() {
        if eliminated[v] || deg != adj[v].len() {
            continue;
        }
        eliminated[v] = true;
        order.push(v);
        let nbrs = std::mem::take(&mut adj[v]);
        for &u in &nbrs {
            let u = u as usize;
            merge_into(&mut adj[u], &nbrs, u as u32);
            if let Ok(p) = adj[u].binary_search(&(v as u32)) {
                adj[u].remove(p);
            }
            heap.push(Reverse((adj[u].len(), u)));
        }
        pattern[v] = nbrs;
    }
    (order, pattern)
}

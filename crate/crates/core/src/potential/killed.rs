use crate::graph::FiniteGraph;
use crate::par::{fill_indexed, Execution};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::VecDeque;

/// One-step operator of the walk killed on leaving the interior, restricted
/// to the interior vertices reachable from a start vertex and indexed in BFS
/// order from it, so that `p_t` is supported on a prefix.
#[derive(Clone, Debug)]
pub struct KilledPropagator {
    /// Local index → graph index.
    global: Vec<usize>,
    /// Graph index → local index (`u32::MAX` if not a reachable interior vertex).
    local: Vec<u32>,
    offsets: Vec<usize>,
    /// Interior neighbours in local indexing.
    targets: Vec<u32>,
    inv_degree: Vec<f64>,
    degree: Vec<f64>,
    /// `prefix[r]` = number of local vertices within distance `r` of the start.
    prefix: Vec<usize>,
}

impl KilledPropagator {
    pub fn new(g: &FiniteGraph, start: usize) -> Result<Self> {
        if start >= g.len() || !g.is_interior(start) {
            return Err(Error::InvalidSpec(format!(
                "start vertex {start} is not interior"
            )));
        }
        let mut local = vec![u32::MAX; g.len()];
        let mut global = vec![start];
        let mut dist = vec![0u32];
        local[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[local[v] as usize];
            for &w in g.neighbors(v) {
                let w = w as usize;
                if g.is_interior(w) && local[w] == u32::MAX {
                    local[w] = global.len() as u32;
                    global.push(w);
                    dist.push(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        let mut offsets = Vec::with_capacity(global.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &v in &global {
            targets.extend(g.neighbors(v).iter().filter_map(|&w| {
                let l = local[w as usize];
                (l != u32::MAX).then_some(l)
            }));
            offsets.push(targets.len());
        }
        let degree: Vec<f64> = global.iter().map(|&v| g.degree(v) as f64).collect();
        let inv_degree = degree.iter().map(|d| 1.0 / d).collect();
        let max_dist = *dist.last().expect("start is present") as usize;
        let mut prefix = vec![0usize; max_dist + 1];
        for &d in &dist {
            prefix[d as usize] += 1;
        }
        for r in 1..=max_dist {
            prefix[r] += prefix[r - 1];
        }
        Ok(KilledPropagator {
            global,
            local,
            offsets,
            targets,
            inv_degree,
            degree,
            prefix,
        })
    }

    /// Number of reachable interior vertices.
    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn global(&self, local: usize) -> usize {
        self.global[local]
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.local
            .get(global)
            .and_then(|&l| (l != u32::MAX).then_some(l as usize))
    }

    pub fn degree(&self, local: usize) -> f64 {
        self.degree[local]
    }

    /// Number of local vertices that can carry mass at time `t`.
    pub fn support(&self, t: usize) -> usize {
        self.prefix[t.min(self.prefix.len() - 1)]
    }

    /// Point mass at the start vertex.
    pub fn initial(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.len()];
        p[0] = 1.0;
        p
    }

    /// `next = p K` where `K` is the killed transition matrix; `t` is the
    /// time index of `p`.
    pub fn step(&self, p: &[f64], next: &mut [f64], t: usize, exec: Execution) {
        let n = self.support(t + 1);
        let from = self.support(t);
        fill_indexed(&mut next[..n], exec, |w| {
            let mut acc = 0.0;
            for &v in &self.targets[self.offsets[w]..self.offsets[w + 1]] {
                let v = v as usize;
                if v < from {
                    acc += p[v] * self.inv_degree[v];
                }
            }
            acc
        });
        for x in next[n..].iter_mut() {
            *x = 0.0;
        }
    }

    /// Probability that one step from local vertex `v` stays in the interior.
    pub fn stay_probability(&self, v: usize) -> f64 {
        (self.offsets[v + 1] - self.offsets[v]) as f64 * self.inv_degree[v]
    }
}

/// Killed kernel from a start vertex for `t = 0..=t_max`.
#[derive(Clone, Debug, Serialize)]
pub struct KilledKernelTrace {
    pub start: usize,
    pub t_max: usize,
    /// `q_t^B(o,o)`.
    pub return_diagonal: Vec<f64>,
    /// `P(τ_B > t) = Σ_v p_t^B(o,v)`.
    pub survival: Vec<f64>,
    /// `p_t^B(o,·)` over graph indices, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Vec<Vec<f64>>>,
    /// Degrees by graph index (needed to turn distributions into densities).
    #[serde(skip)]
    degrees: Vec<f64>,
}

impl KilledKernelTrace {
    /// `q_t^B(o,v) = p_t^B(o,v)/d(v)`, if distributions were kept.
    pub fn density(&self, t: usize, v: usize) -> Option<f64> {
        let p = self.distributions.as_ref()?.get(t)?.get(v)?;
        Some(p / self.degrees[v])
    }

    /// `Σ_{s≤t} q_s^B(o,o)`.
    pub fn partial_green(&self, t: usize) -> f64 {
        self.return_diagonal[..=t.min(self.t_max)].iter().sum()
    }

    /// `Σ_{2s≤t_max} q_{2s}^B(o,o)`.
    pub fn even_sum(&self) -> f64 {
        self.return_diagonal.iter().step_by(2).sum()
    }

    /// Even times `2t` at which `q_{2t+2} > q_{2t}` or `q_{2t+1} > q_{2t}`,
    /// beyond a relative floating tolerance.
    pub fn monotonicity_violations(&self, rel_tol: f64) -> Vec<usize> {
        let q = &self.return_diagonal;
        let mut bad = Vec::new();
        for t in (0..q.len()).step_by(2) {
            let slack = rel_tol * q[t].abs() + 1e-300;
            let odd = q.get(t + 1).is_some_and(|&x| x > q[t] + slack);
            let even = q.get(t + 2).is_some_and(|&x| x > q[t] + slack);
            if odd || even {
                bad.push(t);
            }
        }
        bad
    }
}

/// Iterates the killed operator from the point mass at `o` up to `t_max`.
pub fn killed_densities(
    g: &FiniteGraph,
    o: usize,
    t_max: usize,
    keep_distributions: bool,
    exec: Execution,
) -> Result<KilledKernelTrace> {
    let prop = KilledPropagator::new(g, o)?;
    let mut p = prop.initial();
    let mut next = vec![0.0; prop.len()];
    let d0 = prop.degree(0);
    let mut return_diagonal = Vec::with_capacity(t_max + 1);
    let mut survival = Vec::with_capacity(t_max + 1);
    let mut distributions = keep_distributions.then(Vec::new);
    for t in 0..=t_max {
        return_diagonal.push(p[0] / d0);
        survival.push(p[..prop.support(t)].iter().sum());
        if let Some(d) = distributions.as_mut() {
            let mut full = vec![0.0; g.len()];
            for (l, &x) in p.iter().enumerate() {
                full[prop.global(l)] = x;
            }
            d.push(full);
        }
        if t < t_max {
            prop.step(&p, &mut next, t, exec);
            std::mem::swap(&mut p, &mut next);
        }
    }
    Ok(KilledKernelTrace {
        start: o,
        t_max,
        return_diagonal,
        survival,
        distributions,
        degrees: (0..g.len()).map(|v| g.degree(v) as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_region, FiniteRegion, LatticeOracle, Vertex};

    fn z_slab(r: i64) -> FiniteGraph {
        let region = FiniteRegion::new(
            Vertex::lattice(0, 0),
            format!("|x|<={r}"),
            move |v| matches!(v, Vertex::Lattice { x, .. } if x.abs() <= r),
        );
        extract_region(&LatticeOracle::line(), &region, 1000).unwrap()
    }

    #[test]
    fn two_step_hand_count() {
        let g = z_slab(1);
        let tr = killed_densities(&g, g.root(), 2, true, Execution::Sequential).unwrap();
        let at = |t: usize, x: i64| {
            let i = g.index_of(&Vertex::lattice(x, 0)).unwrap();
            tr.distributions.as_ref().unwrap()[t][i]
        };
        assert_eq!(at(0, 0), 1.0);
        assert_eq!((at(1, -1), at(1, 0), at(1, 1)), (0.5, 0.0, 0.5));
        assert_eq!(at(2, 0), 0.5);
        assert_eq!(tr.survival, vec![1.0, 1.0, 0.5]);
        assert_eq!(tr.density(2, g.root()), Some(0.25));
    }

    #[test]
    fn mass_is_nonincreasing_and_monotone() {
        let g = z_slab(6);
        let tr = killed_densities(&g, g.root(), 400, false, Execution::Sequential).unwrap();
        assert!(tr.survival.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(tr.monotonicity_violations(1e-12).is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = z_slab(30);
        let a = killed_densities(&g, g.root(), 200, false, Execution::Sequential).unwrap();
        let b = killed_densities(&g, g.root(), 200, false, Execution::Threads(3)).unwrap();
        assert_eq!(a.return_diagonal, b.return_diagonal);
    }
}

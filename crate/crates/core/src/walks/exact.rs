use crate::families::{SphericalTreeOracle, SphericalTreeSpec};
use crate::graph::FiniteGraph;
use crate::par::Execution;
use crate::potential::{KilledPropagator, PotentialReport};
use crate::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;

/// Killed mass below which the remaining collision contributions are
/// negligible and propagation stops early.
const NEGLIGIBLE_MASS: f64 = 1e-15;
/// Largest killed mass tolerated at the end of the horizon.
pub const RESIDUAL_MASS_TOLERANCE: f64 = 1e-8;

/// Expected collision counts of two independent walks killed on leaving the
/// interior, both started at `o`.
#[derive(Clone, Debug, Serialize)]
pub struct PairExpectation {
    /// `E Z_B = Σ_t Σ_x p_t(x)²`.
    pub ez: f64,
    /// `E Z̃_B = Σ_t Σ_x Σ_{y∼x} (p_t(x)/d(x))²`, the next step `y` ranging
    /// over all neighbours (boundary included).
    pub ez_edge: f64,
    /// `Σ_t q_{2t}^B(o,o)`.
    pub q_even_sum: f64,
    /// `|E Z̃_B - Σ_t q_{2t}^B(o,o)|`.
    pub identity_gap: f64,
    /// `Σ_x p_t(x)²` for each `t` run.
    pub collision_mass: Vec<f64>,
    pub steps: usize,
    pub residual_mass: f64,
}

/// Exact `E Z_B` and `E Z̃_B` over `t ≤ t_max` by propagating the killed
/// distribution. `q_{2t}(o,o)` is read from the return probability at even
/// times up to `2 t_max`, independently of the collision sums.
pub fn exact_pair_expectation(
    g: &FiniteGraph,
    o: usize,
    t_max: usize,
    exec: Execution,
) -> Result<PairExpectation> {
    let prop = KilledPropagator::new(g, o)?;
    let mut p = prop.initial();
    let mut next = vec![0.0; prop.len()];
    let d0 = prop.degree(0);
    let (mut ez, mut ez_edge, mut q_even_sum) = (0.0, 0.0, 0.0);
    let mut collision_mass = Vec::new();
    let mut residual_mass = 0.0;
    let mut t = 0usize;
    loop {
        let mut mass = 0.0;
        if t <= t_max {
            let (mut sq, mut sq_over_d) = (0.0, 0.0);
            for v in 0..prop.support(t) {
                let x = p[v];
                mass += x;
                sq += x * x;
                sq_over_d += x * x / prop.degree(v);
            }
            ez += sq;
            ez_edge += sq_over_d;
            collision_mass.push(sq);
            residual_mass = mass;
        } else {
            mass = p[..prop.support(t)].iter().sum();
        }
        if t.is_multiple_of(2) {
            q_even_sum += p[0] / d0;
        }
        if t >= 2 * t_max || mass < NEGLIGIBLE_MASS {
            break;
        }
        prop.step(&p, &mut next, t, exec);
        std::mem::swap(&mut p, &mut next);
        t += 1;
    }
    if residual_mass >= RESIDUAL_MASS_TOLERANCE {
        return Err(Error::ResidualMass {
            mass: residual_mass,
            steps: t_max,
        });
    }
    Ok(PairExpectation {
        ez,
        ez_edge,
        q_even_sum,
        identity_gap: (ez_edge - q_even_sum).abs(),
        steps: collision_mass.len() - 1,
        collision_mass,
        residual_mass,
    })
}

/// `g + 2 g max_y g(y,y)`, the bound on `E Z̃_B²`.
pub fn second_moment_bound(report: &PotentialReport) -> Option<f64> {
    let g = report.green_root;
    report.max_diagonal().map(|m| g + 2.0 * g * m)
}

/// Transition vectors `p_t^BD(0, ·)` of the birth–death chain of the tree's
/// distance from the root, `t = 0..=t_max`, on states `0..=t_max`.
#[derive(Clone, Debug, Serialize)]
pub struct BirthDeathTrace {
    pub up_probability: Vec<f64>,
    pub densities: Vec<Vec<f64>>,
}

impl BirthDeathTrace {
    pub fn p(&self, t: usize, x: usize) -> f64 {
        self.densities[t].get(x).copied().unwrap_or(0.0)
    }
}

pub fn bd_chain_densities(spec: &SphericalTreeSpec, t_max: usize) -> Result<BirthDeathTrace> {
    let tree = SphericalTreeOracle::new(spec.clone())?;
    if let Some(max) = tree.max_distance() {
        if t_max as u64 >= max {
            return Err(Error::DepthCapExceeded {
                vertex: format!("distance {t_max}"),
                max_distance: max,
            });
        }
    }
    let up: Vec<f64> = (0..=t_max as u64 + 1)
        .map(|x| {
            if x == 0 {
                1.0
            } else if (1..=tree.levels()).any(|k| tree.branch_point_distance(k) == Some(x)) {
                2.0 / 3.0
            } else {
                0.5
            }
        })
        .collect();
    let mut densities = Vec::with_capacity(t_max + 1);
    let mut p = vec![0.0; t_max + 2];
    p[0] = 1.0;
    densities.push(p[..=t_max].to_vec());
    for _ in 0..t_max {
        let mut q = vec![0.0; t_max + 2];
        for x in 0..=t_max {
            if p[x] == 0.0 {
                continue;
            }
            q[x + 1] += p[x] * up[x];
            if x > 0 {
                q[x - 1] += p[x] * (1.0 - up[x]);
            }
        }
        p = q;
        densities.push(p[..=t_max].to_vec());
    }
    Ok(BirthDeathTrace {
        up_probability: up[..=t_max].to_vec(),
        densities,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallotRow {
    pub h: u32,
    pub s: u32,
    /// `P_h(T_0 = s)`.
    pub first_hit: String,
    /// `(h/s) P_h(S_s = 0)`.
    pub ballot: String,
    pub equal: bool,
}

/// Exact first-hit distribution of 0 for simple random walk on ℤ from `h`,
/// compared with `(h/s) P_h(S_s = 0)` in rational arithmetic.
pub fn ballot_check(h_max: u32, s_max: u32) -> Vec<BallotRow> {
    let mut rows = Vec::new();
    for h in 1..=h_max {
        // path counts of the walk killed at 0, positions 0..=h+s_max
        let width = (h + s_max + 2) as usize;
        let mut count = vec![0i128; width];
        count[h as usize] = 1;
        for s in 1..=s_max {
            let mut next = vec![0i128; width];
            let mut hits = 0i128;
            for x in 1..width - 1 {
                let c = count[x];
                if c == 0 {
                    continue;
                }
                next[x + 1] += c;
                if x == 1 {
                    hits += c;
                } else {
                    next[x - 1] += c;
                }
            }
            count = next;
            let scale = 1i128 << s;
            let first_hit = Ratio::new(hits, scale);
            let ballot = if (s + h) % 2 == 0 && h <= s {
                Ratio::new(h as i128, s as i128) * Ratio::new(binomial(s, (s + h) / 2), scale)
            } else {
                Ratio::from_integer(0)
            };
            rows.push(BallotRow {
                h,
                s,
                first_hit: first_hit.to_string(),
                ballot: ballot.to_string(),
                equal: first_hit == ballot,
            });
        }
    }
    rows
}

fn binomial(n: u32, k: u32) -> i128 {
    let k = k.min(n - k) as i128;
    let n = n as i128;
    (0..k).fold(1i128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_region, FiniteRegion, LatticeOracle, Vertex};

    #[test]
    fn single_vertex_region() {
        let region = FiniteRegion::new(Vertex::lattice(0, 0), "{0}", |v| {
            *v == Vertex::lattice(0, 0)
        });
        let g = extract_region(&LatticeOracle::line(), &region, 10).unwrap();
        let e = exact_pair_expectation(&g, 0, 10, Execution::Sequential).unwrap();
        assert_eq!(e.ez, 1.0);
        assert_eq!(e.ez_edge, 0.5);
        assert_eq!(e.q_even_sum, 0.5);
    }

    #[test]
    fn slab_hand_values() {
        // |x| ≤ 1: p_0 = δ_0, p_1 = (1/2, 0, 1/2), p_2 = δ_0/2, ...
        let region = FiniteRegion::new(
            Vertex::lattice(0, 0),
            "|x|<=1",
            |v| matches!(v, Vertex::Lattice { x, .. } if x.abs() <= 1),
        );
        let g = extract_region(&LatticeOracle::line(), &region, 10).unwrap();
        let e = exact_pair_expectation(&g, g.root(), 200, Execution::Sequential).unwrap();
        // E Z = Σ_k 4^{-k}(1 + 1/2) = 2, E Z̃ = Σ_k 4^{-k} (1/2 + 1/4) = 1
        assert!((e.ez - 2.0).abs() < 1e-12);
        assert!((e.ez_edge - 1.0).abs() < 1e-12);
        assert!(e.identity_gap < 1e-12);
    }

    #[test]
    fn residual_mass_error() {
        let region = FiniteRegion::new(
            Vertex::lattice(0, 0),
            "|x|<=20",
            |v| matches!(v, Vertex::Lattice { x, .. } if x.abs() <= 20),
        );
        let g = extract_region(&LatticeOracle::line(), &region, 100).unwrap();
        assert!(matches!(
            exact_pair_expectation(&g, g.root(), 10, Execution::Sequential),
            Err(Error::ResidualMass { .. })
        ));
    }

    #[test]
    fn bd_chain_small_cases() {
        let bd = bd_chain_densities(&SphericalTreeSpec::explicit(vec![1, 5]), 10).unwrap();
        assert_eq!(bd.p(1, 1), 1.0);
        assert_eq!(bd.up_probability[1], 2.0 / 3.0);
        assert!((bd.p(2, 2) - 2.0 / 3.0).abs() < 1e-15);
        for t in 0..=10 {
            assert!((bd.densities[t].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ballot_identity_small() {
        assert!(ballot_check(3, 12).iter().all(|r| r.equal));
        let r = ballot_check(1, 1);
        assert_eq!(r[0].first_hit, "1/2");
    }
}

use super::estimator::{
    estimate_proportion, ratio_of_means, run_replicates, EstimatorResult, MAX_FAILURE_RATE,
};
use crate::families::{BranchLengths, CombOracle, SphericalTreeOracle};
use crate::graph::{NeighborOracle, Vertex};
use crate::par::Execution;
use crate::walks::{run_pair, OracleSpace, RngStream, WalkSpace};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default cap on the quartic time windows.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSet {
    /// `Q_{k,h} = {(k,y) : 0 ≤ y ≤ h}`.
    CombTooth { k: i64, h: i64 },
    /// `Q_{k,2h/3} \ Q_{k,h/3}`: heights `⌊h/3⌋ < y ≤ ⌊2h/3⌋` of tooth `k`.
    CombMidBand { k: i64, h: i64 },
    /// `I_{n,l}`: level-`n` vertices at distance in `[2^l a_n, 2^{l+1} a_n)`,
    /// cut at the next branch point.
    TreeInterval { n: usize, l: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HorizonPolicy {
    /// Collisions at `t ≤ steps`.
    Fixed { steps: u64 },
    /// Collisions at `start ≤ t ≤ end`.
    Window { start: u64, end: u64 },
    /// The dyadic windows of the tree intervals: `[(2^l a)², 2(2^l a)²]` for
    /// `β ≥ 1` and `[2(2^{l+1} a)², (2^{l+1} a)⁴]` for `1/2 ≤ β < 1`, the
    /// latter capped at `step_budget`.
    Dyadic {
        #[serde(default)]
        beta: Option<f64>,
        #[serde(default)]
        step_budget: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCollisionSpec {
    pub target: TargetSet,
    pub horizon: HorizonPolicy,
}

/// Graph context needed to resolve a target set.
#[derive(Clone, Copy)]
pub enum TargetContext<'a> {
    Comb(&'a CombOracle),
    Tree(&'a SphericalTreeOracle),
}

/// A target set with a concrete membership test and time window.
#[derive(Clone)]
pub struct ResolvedTarget {
    pub label: String,
    member: Arc<dyn Fn(&Vertex) -> bool + Send + Sync>,
    pub start: u64,
    pub end: u64,
    /// True when the window was cut at the step budget.
    pub truncated: bool,
}

impl ResolvedTarget {
    pub fn contains(&self, v: &Vertex) -> bool {
        (self.member)(v)
    }
}

/// The dyadic intervals `(l, lo, hi)` of level `n`, distances `lo ≤ d < hi`.
pub fn tree_intervals(tree: &SphericalTreeOracle, n: usize) -> Result<Vec<(u32, u64, u64)>> {
    if n == 0 || n > tree.levels() {
        return Err(Error::InvalidSpec(format!(
            "tree level {n} is not materialized"
        )));
    }
    let a = tree.branch_point_distance(n).expect("level checked");
    let end = a + tree
        .segment_length(n)
        .expect("segment length of a materialized level");
    let mut out = Vec::new();
    let mut l = 0u32;
    while let Some(lo) = a.checked_mul(1u64 << l).filter(|&lo| lo < end) {
        let hi = a.saturating_mul(2u64 << l).min(end);
        out.push((l, lo, hi));
        l += 1;
        if l >= 62 {
            break;
        }
    }
    Ok(out)
}

impl SetCollisionSpec {
    pub fn resolve(&self, ctx: TargetContext<'_>) -> Result<ResolvedTarget> {
        let (label, member, scale): (
            String,
            Arc<dyn Fn(&Vertex) -> bool + Send + Sync>,
            Option<(f64, u64, u32)>,
        ) = match (&self.target, ctx) {
            (TargetSet::CombTooth { k, h }, TargetContext::Comb(c)) => {
                check_height(c, *k, *h)?;
                let (k, h) = (*k, *h);
                (
                    format!("Q(k={k},h={h})"),
                    Arc::new(
                        move |v: &Vertex| matches!(*v, Vertex::Comb { x, y } if x == k && y <= h),
                    ),
                    None,
                )
            }
            (TargetSet::CombMidBand { k, h }, TargetContext::Comb(c)) => {
                check_height(c, *k, *h)?;
                let (k, lo, hi) = (*k, *h / 3, 2 * *h / 3);
                (
                    format!("band(k={k},h={h})"),
                    Arc::new(
                        move |v: &Vertex| matches!(*v, Vertex::Comb { x, y } if x == k && y > lo && y <= hi),
                    ),
                    None,
                )
            }
            (TargetSet::TreeInterval { n, l }, TargetContext::Tree(t)) => {
                let intervals = tree_intervals(t, *n)?;
                let &(_, lo, hi) = intervals.iter().find(|i| i.0 == *l).ok_or_else(|| {
                    Error::InvalidSpec(format!("level {n} has no interval l={l}"))
                })?;
                let beta = match (&self.horizon, &t.spec().lengths) {
                    (HorizonPolicy::Dyadic { beta: Some(b), .. }, _) => *b,
                    (_, BranchLengths::Doubly { beta }) => *beta,
                    _ => f64::NAN,
                };
                let tree = t.clone();
                let a = t.branch_point_distance(*n).expect("level checked");
                (
                    format!("I(n={n},l={l})"),
                    Arc::new(move |v: &Vertex| tree.distance(v).is_ok_and(|d| d >= lo && d < hi)),
                    Some((beta, a, *l)),
                )
            }
            _ => {
                return Err(Error::InvalidSpec(
                    "target set does not match the family".into(),
                ))
            }
        };
        let (start, end, truncated) = match &self.horizon {
            HorizonPolicy::Fixed { steps } => (0, *steps, false),
            HorizonPolicy::Window { start, end } if start <= end => (*start, *end, false),
            HorizonPolicy::Window { .. } => {
                return Err(Error::InvalidSpec("window start exceeds end".into()))
            }
            HorizonPolicy::Dyadic { step_budget, .. } => {
                let (beta, a, l) = scale.ok_or_else(|| {
                    Error::InvalidSpec("dyadic windows apply to tree intervals only".into())
                })?;
                let budget = step_budget.unwrap_or(DEFAULT_STEP_BUDGET);
                let s = (a as f64) * (1u64 << l) as f64;
                let (start, end) = if beta >= 1.0 {
                    (s * s, 2.0 * s * s)
                } else if beta >= 0.5 {
                    (2.0 * (2.0 * s).powi(2), (2.0 * s).powi(4))
                } else {
                    return Err(Error::InvalidSpec(format!(
                        "dyadic windows need a known beta >= 1/2 (got {beta})"
                    )));
                };
                let truncated = end > budget as f64;
                if start > budget as f64 {
                    return Err(Error::InvalidSpec(format!(
                        "window start {start:e} exceeds the step budget {budget}"
                    )));
                }
                (start as u64, (end.min(budget as f64)) as u64, truncated)
            }
        };
        Ok(ResolvedTarget {
            label,
            member,
            start,
            end,
            truncated,
        })
    }
}

fn check_height(c: &CombOracle, k: i64, h: i64) -> Result<()> {
    if h < 0 || h > c.height(k) {
        return Err(Error::InvalidSpec(format!(
            "band height {h} exceeds tooth height {} at k={k}",
            c.height(k)
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SetCollisionResult {
    pub label: String,
    pub estimate: EstimatorResult,
    pub window_start: u64,
    pub window_end: u64,
    pub truncated: bool,
}

/// `P(X_t = Y_t ∈ A for some t in the window)` for two walks from `o`.
/// A replicate stops at its first collision in the set.
pub fn set_collision_probability<O: NeighborOracle + ?Sized>(
    oracle: &O,
    o: &Vertex,
    target: &ResolvedTarget,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<SetCollisionResult> {
    set_collision_probability_in(&OracleSpace::new(oracle), o, target, replicates, seed, exec)
}

/// As [`set_collision_probability`], on any walk space.
pub fn set_collision_probability_in<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    target: &ResolvedTarget,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<SetCollisionResult> {
    let estimate = estimate_proportion(
        &format!("P(collision in {})", target.label),
        replicates,
        seed,
        exec,
        MAX_FAILURE_RATE,
        |k| {
            let mut hit = false;
            run_pair(
                space,
                o,
                o,
                target.end,
                RngStream::new(seed, k),
                |t, x, y| {
                    if t >= target.start && x == y && target.contains(&space.vertex(x)) {
                        hit = true;
                    }
                    !hit
                },
            )?;
            Ok(hit)
        },
    )?;
    Ok(SetCollisionResult {
        label: target.label.clone(),
        estimate,
        window_start: target.start,
        window_end: target.end,
        truncated: target.truncated,
    })
}

/// Hit indicators of several targets, all read off the same pair of walks.
#[derive(Clone, Debug)]
pub struct SharedSetCollisions {
    pub results: Vec<SetCollisionResult>,
    /// `hits[i][k]`: 1 if replicate `k` collided in target `i` within its window.
    pub hits: Vec<Vec<f64>>,
}

impl SharedSetCollisions {
    /// `P(target i) / P(target j)` with a paired delta-method interval.
    pub fn ratio(&self, i: usize, j: usize) -> Result<EstimatorResult> {
        let seed = self.results[i].estimate.master_seed;
        let label = format!("P({})/P({})", self.results[i].label, self.results[j].label);
        ratio_of_means(label, &self.hits[i], &self.hits[j], seed)
    }
}

/// Estimates every target from one pair of walks per replicate, so ratios
/// between targets are paired. A replicate stops once every target is hit
/// or every window has closed.
pub fn shared_set_collisions_in<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    targets: &[ResolvedTarget],
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<SharedSetCollisions> {
    if targets.is_empty() {
        return Err(Error::InvalidSpec("need at least one target".into()));
    }
    let top = targets.iter().map(|t| t.end).max().expect("nonempty");
    let (rows, failures) = run_replicates(replicates, exec, MAX_FAILURE_RATE, |k| {
        let mut hit = vec![false; targets.len()];
        let mut left = targets.len();
        run_pair(space, o, o, top, RngStream::new(seed, k), |t, x, y| {
            if x == y {
                let v = space.vertex(x);
                for (h, target) in hit.iter_mut().zip(targets) {
                    if !*h && t >= target.start && t <= target.end && target.contains(&v) {
                        *h = true;
                        left -= 1;
                    }
                }
            }
            left > 0
        })?;
        Ok(hit)
    })?;
    let hits: Vec<Vec<f64>> = (0..targets.len())
        .map(|i| rows.iter().map(|r| r[i] as u8 as f64).collect())
        .collect();
    let results = targets
        .iter()
        .zip(&hits)
        .map(|(t, h)| {
            let successes = h.iter().filter(|&&x| x > 0.0).count() as u64;
            let mut estimate = EstimatorResult::from_counts(
                format!("P(collision in {})", t.label),
                successes,
                h.len() as u64,
                seed,
            )?;
            estimate.failures = failures;
            Ok(SetCollisionResult {
                label: t.label.clone(),
                estimate,
                window_start: t.start,
                window_end: t.end,
                truncated: t.truncated,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SharedSetCollisions { results, hits })
}

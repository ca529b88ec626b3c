use crate::families::{CombOracle, CombSpec};
use crate::graph::{extract_region, FiniteRegion, Vertex};
use crate::par::{map_indexed, Execution};
use crate::potential::KilledPropagator;
use crate::table::to_csv_with_header;
use crate::walks::{walk, OracleSpace, RngStream, LANE_X};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exit mass tolerated by the exact mode at the largest time.
pub const PROFILE_EXIT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileMode {
    /// Killed densities on the box `|x| ≤ half_width, y ≤ height_cap`;
    /// unspecified sizes start from a diffusive guess and double until the
    /// exit mass is below tolerance.
    Exact {
        #[serde(default)]
        half_width: Option<i64>,
        #[serde(default)]
        height_cap: Option<i64>,
    },
    MonteCarlo {
        replicates: u64,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: u64,
    /// `p_t(0,(k,0))`.
    pub p: f64,
    pub p_se: f64,
    /// `t^{β'} p_t`.
    pub time_scaled: f64,
    /// `k^{1+α'} p_t`.
    pub space_scaled: f64,
    /// Mass absorbed outside the computational box by time `t`.
    pub exit_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionProfile {
    pub k: i64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    pub half_width: Option<i64>,
    pub height_cap: Option<i64>,
    /// Largest `|Σ_x p_t(x) + exit_t - 1|` seen (exact mode).
    pub conservation_error: f64,
    pub rows: Vec<ProfileRow>,
}

impl TransitionProfile {
    /// CSV with columns `t,p,p_se,time_scaled,space_scaled,exit_mass`.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.t, r.p, r.p_se, r.time_scaled, r.space_scaled, r.exit_mass))
            .collect();
        to_csv_with_header(
            &["t", "p", "p_se", "time_scaled", "space_scaled", "exit_mass"],
            &rows,
        )
    }
}

/// `p_t(0,(k,0))` on `Comb(ℤ, f)` over a grid of times, with normalized
/// columns for flatness inspection.
pub fn transition_profile(
    comb: &CombSpec,
    k: i64,
    t_grid: &[u64],
    mode: &ProfileMode,
    exec: Execution,
) -> Result<TransitionProfile> {
    if comb.base_dimension != 1 {
        return Err(Error::InvalidSpec(
            "transition profiles are defined on Comb(Z)".into(),
        ));
    }
    let (ap, bp) = match (comb.alpha_prime(), comb.beta_prime()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidSpec(
                "transition profiles need a power profile".into(),
            ))
        }
    };
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec(
            "time grid must be nonempty and strictly increasing".into(),
        ));
    }
    let oracle = CombOracle::new(comb.clone())?;
    let t_max = *t_grid.last().expect("nonempty");
    let row = |t: u64, p: f64, se: f64, exit: f64| ProfileRow {
        t,
        p,
        p_se: se,
        time_scaled: (t as f64).powf(bp) * p,
        space_scaled: (k.unsigned_abs() as f64).powf(1.0 + ap) * p,
        exit_mass: exit,
    };
    match mode {
        ProfileMode::MonteCarlo { replicates, seed } => {
            let space = OracleSpace::new(&oracle);
            let target = Vertex::comb(k, 0);
            let hits: Vec<Result<Vec<bool>>> = map_indexed(*replicates, exec, |r| {
                let mut rng = RngStream::new(*seed, r).lane(LANE_X);
                let path = walk(&space, &Vertex::comb(0, 0), t_max, &mut rng)?;
                Ok(t_grid.iter().map(|&t| path[t as usize] == target).collect())
            });
            let mut counts = vec![0u64; t_grid.len()];
            for h in hits {
                for (c, b) in counts.iter_mut().zip(h?) {
                    *c += b as u64;
                }
            }
            let n = *replicates as f64;
            let rows = t_grid
                .iter()
                .zip(&counts)
                .map(|(&t, &c)| {
                    let p = c as f64 / n;
                    row(t, p, (p * (1.0 - p) / n).sqrt(), 0.0)
                })
                .collect();
            Ok(TransitionProfile {
                k,
                alpha_prime: ap,
                beta_prime: bp,
                half_width: None,
                height_cap: None,
                conservation_error: 0.0,
                rows,
            })
        }
        ProfileMode::Exact {
            half_width,
            height_cap,
        } => {
            let tf = t_max as f64;
            let mut w =
                half_width.unwrap_or((4.0 * tf.powf(1.0 / (2.0 + ap))).ceil() as i64 + k.abs() + 8);
            let mut h = height_cap.unwrap_or((8.0 * tf.sqrt()).ceil() as i64 + 8);
            let auto = half_width.is_none() || height_cap.is_none();
            loop {
                let out = exact_profile(&oracle, k, t_grid, w, h, exec)?;
                let exit = out.iter().map(|r| r.3).fold(0.0, f64::max);
                if exit <= PROFILE_EXIT_TOLERANCE {
                    let cons = out.iter().map(|r| r.4).fold(0.0, f64::max);
                    let rows = out
                        .iter()
                        .map(|&(t, p, _, e, _)| row(t, p, 0.0, e))
                        .collect();
                    return Ok(TransitionProfile {
                        k,
                        alpha_prime: ap,
                        beta_prime: bp,
                        half_width: Some(w),
                        height_cap: Some(h),
                        conservation_error: cons,
                        rows,
                    });
                }
                if !auto || w > 1 << 20 {
                    return Err(Error::RegionTooSmall {
                        mass: exit,
                        tolerance: PROFILE_EXIT_TOLERANCE,
                    });
                }
                if half_width.is_none() {
                    w *= 2;
                }
                if height_cap.is_none() {
                    h *= 2;
                }
            }
        }
    }
}

/// Rows `(t, p_t(target), survival, exit, conservation error)`.
fn exact_profile(
    oracle: &CombOracle,
    k: i64,
    t_grid: &[u64],
    w: i64,
    h: i64,
    exec: Execution,
) -> Result<Vec<(u64, f64, f64, f64, f64)>> {
    if k.abs() > w {
        return Err(Error::InvalidSpec(
            "target lies outside the computational box".into(),
        ));
    }
    let region = FiniteRegion::new(
        Vertex::comb(0, 0),
        format!("box(w={w},h={h})"),
        move |v| matches!(*v, Vertex::Comb { x, y } if x.abs() <= w && y <= h),
    );
    let g = extract_region(oracle, &region, usize::MAX)?;
    let prop = KilledPropagator::new(&g, g.root())?;
    let target = g
        .index_of(&Vertex::comb(k, 0))
        .and_then(|i| prop.local(i))
        .ok_or_else(|| Error::InvalidSpec("target is not reachable".into()))?;
    let mut p = prop.initial();
    let mut next = vec![0.0; prop.len()];
    let mut exit = 0.0;
    let t_max = *t_grid.last().expect("nonempty") as usize;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut grid = t_grid.iter().peekable();
    for t in 0..=t_max {
        if grid.peek().is_some_and(|&&g| g as usize == t) {
            grid.next();
            let n = prop.support(t);
            let survival: f64 = p[..n].iter().sum();
            out.push((
                t as u64,
                p[target],
                survival,
                exit,
                (survival + exit - 1.0).abs(),
            ));
        }
        if t == t_max {
            break;
        }
        let n = prop.support(t);
        exit += (0..n)
            .map(|v| p[v] * (1.0 - prop.stay_probability(v)))
            .sum::<f64>();
        prop.step(&p, &mut next, t, exec);
        std::mem::swap(&mut p, &mut next);
    }
    Ok(out)
}

//! JSON experiment configurations and their runner, e.g.
//! `{"experiment":"growth-curve","family":{...},"horizons":[...],"replicates":1000,"seed":1}`.

use super::branching::{backbone_offspring, kolmogorov_check};
use super::estimator::EstimatorResult;
use super::growth::{collision_growth_curve, triple_growth_curve, GrowthCurve};
use super::percolation::{percolation_collision_run, PercolationRunConfig, StartPolicy};
use super::profile::{transition_profile, ProfileMode};
use super::sets::{
    shared_set_collisions_in, HorizonPolicy, SetCollisionSpec, TargetContext, TargetSet,
};
use crate::criterion::estimate_j_prob;
use crate::families::{
    BranchLengths, BuiltFamily, CombOracle, CombSpec, FamilySpec, OffspringLaw, Profile,
    SphericalTreeOracle, SphericalTreeSpec,
};
use crate::graph::{FiniteGraph, Vertex, DEFAULT_VERTEX_CAP};
use crate::par::Execution;
use crate::potential::nash_williams_cutsum;
use crate::table::{to_csv, to_csv_with_header};
use crate::walks::{
    bd_chain_densities, encode_path, walk, CombSpace, IndexSpace, OracleSpace, RngStream, WalkSpace,
};
use crate::walks::{LANE_ENV, LANE_X, LANE_Y};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_REPLICATES: u64 = 1000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Walkers {
    #[default]
    Pair,
    Triple,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    /// Mean and median cumulative collisions at each horizon.
    GrowthCurve {
        family: FamilySpec,
        horizons: Vec<u64>,
        #[serde(default)]
        walkers: Walkers,
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    SetCollision {
        family: FamilySpec,
        targets: Vec<TargetSet>,
        horizon: HorizonPolicy,
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Kolmogorov {
        offspring: OffspringLaw,
        n: usize,
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Off-backbone offspring of Kesten-tree backbone nodes.
    Backbone {
        offspring: OffspringLaw,
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    TransitionProfile {
        profile: Profile,
        k: i64,
        t_grid: Vec<u64>,
        #[serde(default)]
        mode: Option<ProfileMode>,
    },
    Percolation {
        p: f64,
        half_width: i64,
        horizons: Vec<u64>,
        clusters: u64,
        #[serde(default)]
        burn_in: Option<u64>,
        #[serde(default)]
        start: StartPolicy,
        /// Walk pairs per cluster.
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// `P(r ∈ J(λ))` over sampled Kesten trees.
    JProb {
        offspring: OffspringLaw,
        r: u64,
        lambdas: Vec<f64>,
        #[serde(default)]
        replicates: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    NashWilliams {
        lengths: BranchLengths,
        depth_cap: usize,
        n_max: u64,
    },
    BirthDeath {
        lengths: BranchLengths,
        depth_cap: usize,
        t_max: usize,
    },
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<u64>,
}

/// Execution settings that never change numeric output.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub exec: Execution,
    pub vertex_cap: usize,
    pub dump_paths: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            exec: Execution::Parallel,
            vertex_cap: DEFAULT_VERTEX_CAP,
            dump_paths: false,
        }
    }
}

/// A named output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Output {
    pub fn text(name: &str, s: String) -> Self {
        Output {
            name: name.into(),
            bytes: s.into_bytes(),
        }
    }

    pub fn json(name: &str, v: &impl Serialize) -> Result<Self> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        Ok(Output::text(name, s))
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::GrowthCurve { .. } => "growth-curve",
            ExperimentConfig::SetCollision { .. } => "set-collision",
            ExperimentConfig::Kolmogorov { .. } => "kolmogorov",
            ExperimentConfig::Backbone { .. } => "backbone",
            ExperimentConfig::TransitionProfile { .. } => "transition-profile",
            ExperimentConfig::Percolation { .. } => "percolation",
            ExperimentConfig::JProb { .. } => "j-prob",
            ExperimentConfig::NashWilliams { .. } => "nash-williams",
            ExperimentConfig::BirthDeath { .. } => "birth-death",
        }
    }

    /// Fills every defaulted field, applying `overrides` first. The result
    /// serializes to the "resolved defaults" of a run manifest.
    pub fn resolve(&self, overrides: Overrides) -> ExperimentConfig {
        let mut c = self.clone();
        let fill = |field: &mut Option<u64>, over: Option<u64>, default: u64| {
            *field = over.or(*field).or(Some(default));
        };
        use ExperimentConfig::*;
        match &mut c {
            GrowthCurve {
                replicates, seed, ..
            }
            | SetCollision {
                replicates, seed, ..
            }
            | Kolmogorov {
                replicates, seed, ..
            }
            | Backbone {
                replicates, seed, ..
            }
            | JProb {
                replicates, seed, ..
            } => {
                fill(replicates, overrides.replicates, DEFAULT_REPLICATES);
                fill(seed, overrides.seed, DEFAULT_SEED);
            }
            Percolation {
                replicates,
                seed,
                burn_in,
                ..
            } => {
                fill(replicates, overrides.replicates, DEFAULT_REPLICATES);
                fill(seed, overrides.seed, DEFAULT_SEED);
                burn_in.get_or_insert(1000);
            }
            TransitionProfile { mode, .. } => {
                let m = mode.get_or_insert(ProfileMode::Exact {
                    half_width: None,
                    height_cap: None,
                });
                if let ProfileMode::MonteCarlo { replicates, seed } = m {
                    *replicates = overrides.replicates.unwrap_or(*replicates);
                    *seed = overrides.seed.unwrap_or(*seed);
                }
            }
            NashWilliams { .. } | BirthDeath { .. } => {}
        }
        c
    }

    /// Master seed after resolution (0 for deterministic experiments).
    pub fn seed(&self) -> u64 {
        use ExperimentConfig::*;
        match self {
            GrowthCurve { seed, .. }
            | SetCollision { seed, .. }
            | Kolmogorov { seed, .. }
            | Backbone { seed, .. }
            | JProb { seed, .. }
            | Percolation { seed, .. } => seed.unwrap_or(DEFAULT_SEED),
            TransitionProfile {
                mode: Some(ProfileMode::MonteCarlo { seed, .. }),
                ..
            } => *seed,
            _ => DEFAULT_SEED,
        }
    }

    /// Runs a resolved config and returns its output files.
    pub fn run(&self, opts: &RunOptions) -> Result<Vec<Output>> {
        let seed = self.seed();
        let reps = |r: &Option<u64>| r.unwrap_or(DEFAULT_REPLICATES);
        match self {
            ExperimentConfig::GrowthCurve {
                family,
                horizons,
                walkers,
                replicates,
                ..
            } => run_growth(family, horizons, *walkers, reps(replicates), seed, opts),
            ExperimentConfig::SetCollision {
                family,
                targets,
                horizon,
                replicates,
                ..
            } => run_sets(family, targets, horizon, reps(replicates), seed, opts),
            ExperimentConfig::Kolmogorov {
                offspring,
                n,
                replicates,
                ..
            } => {
                let k =
                    kolmogorov_check(&offspring.build()?, *n, reps(replicates), seed, opts.exec)?;
                let e = &k.estimate;
                let csv = to_csv_with_header(
                    &[
                        "n",
                        "estimate",
                        "standard_error",
                        "ci_low",
                        "ci_high",
                        "exact",
                        "reference",
                        "variance",
                        "replicates",
                    ],
                    &[(
                        k.n,
                        e.estimate,
                        e.standard_error,
                        e.ci_low,
                        e.ci_high,
                        k.exact,
                        k.reference,
                        k.variance,
                        e.replicates,
                    )],
                )?;
                Ok(vec![Output::text("kolmogorov.csv", csv)])
            }
            ExperimentConfig::Backbone {
                offspring,
                replicates,
                ..
            } => {
                let law = offspring.build()?;
                let values = backbone_offspring(&law, reps(replicates), seed, opts.exec)?;
                let est =
                    EstimatorResult::from_values("mean off-backbone offspring", &values, seed)?;
                let csv = to_csv_with_header(
                    &[
                        "nodes",
                        "mean",
                        "standard_error",
                        "ci_low",
                        "ci_high",
                        "variance",
                    ],
                    &[(
                        values.len(),
                        est.estimate,
                        est.standard_error,
                        est.ci_low,
                        est.ci_high,
                        law.variance(),
                    )],
                )?;
                Ok(vec![Output::text("backbone.csv", csv)])
            }
            ExperimentConfig::TransitionProfile {
                profile,
                k,
                t_grid,
                mode,
            } => {
                let spec = CombSpec {
                    profile: profile.clone(),
                    base_dimension: 1,
                };
                let mode = mode.clone().unwrap_or(ProfileMode::Exact {
                    half_width: None,
                    height_cap: None,
                });
                let tp = transition_profile(&spec, *k, t_grid, &mode, opts.exec)?;
                Ok(vec![
                    Output::text("profile.csv", tp.to_csv()?),
                    Output::json(
                        "profile_summary.json",
                        &serde_json::json!({
                            "k": tp.k,
                            "alpha_prime": tp.alpha_prime,
                            "beta_prime": tp.beta_prime,
                            "half_width": tp.half_width,
                            "height_cap": tp.height_cap,
                            "conservation_error": tp.conservation_error,
                        }),
                    )?,
                ])
            }
            ExperimentConfig::Percolation {
                p,
                half_width,
                horizons,
                clusters,
                burn_in,
                start,
                replicates,
                ..
            } => {
                let cfg = PercolationRunConfig {
                    p: *p,
                    half_width: *half_width,
                    horizons: horizons.clone(),
                    clusters: *clusters,
                    pairs_per_cluster: reps(replicates),
                    burn_in: burn_in.unwrap_or(1000),
                    start: *start,
                };
                let run = percolation_collision_run(&cfg, seed, opts.exec)?;
                let mut out = growth_outputs(&run.curve)?;
                out.push(Output::text("clusters.csv", to_csv(&run.clusters)?));
                Ok(out)
            }
            ExperimentConfig::JProb {
                offspring,
                r,
                lambdas,
                replicates,
                ..
            } => {
                let law = offspring.clone();
                let cap = opts.vertex_cap;
                let height = *r as usize + 2;
                let sampler = |k: u64| -> Result<FiniteGraph> {
                    let s = FamilySpec::Kesten {
                        offspring: law.clone(),
                        height,
                        subtree_depth_cap: Some(*r + 1),
                        seed: Some(RngStream::new(seed, k).lane(LANE_ENV).random()),
                    };
                    match s.build(seed, cap)? {
                        BuiltFamily::Graph(g) => Ok(g),
                        BuiltFamily::Oracle { .. } => {
                            unreachable!("kesten trees are sampled graphs")
                        }
                    }
                };
                let est =
                    estimate_j_prob(sampler, *r, lambdas, reps(replicates), seed, cap, opts.exec)?;
                let rows: Vec<_> = lambdas
                    .iter()
                    .zip(&est)
                    .map(|(l, e)| {
                        (
                            *r,
                            *l,
                            e.estimate,
                            e.ci_low,
                            e.ci_high,
                            e.replicates,
                            e.failures,
                        )
                    })
                    .collect();
                let csv = to_csv_with_header(
                    &[
                        "r",
                        "lambda",
                        "estimate",
                        "ci_low",
                        "ci_high",
                        "replicates",
                        "failures",
                    ],
                    &rows,
                )?;
                Ok(vec![Output::text("j_prob.csv", csv)])
            }
            ExperimentConfig::NashWilliams {
                lengths,
                depth_cap,
                n_max,
            } => {
                let spec = SphericalTreeSpec {
                    lengths: lengths.clone(),
                    depth_cap: *depth_cap,
                };
                let rep = nash_williams_cutsum(&spec, *n_max)?;
                Ok(vec![Output::text("cutsum.csv", to_csv(&rep.rows)?)])
            }
            ExperimentConfig::BirthDeath {
                lengths,
                depth_cap,
                t_max,
            } => {
                let spec = SphericalTreeSpec {
                    lengths: lengths.clone(),
                    depth_cap: *depth_cap,
                };
                let bd = bd_chain_densities(&spec, *t_max)?;
                let mut rows = Vec::new();
                for t in 0..=*t_max {
                    for x in 0..=t {
                        let p = bd.p(t, x);
                        if p > 0.0 {
                            rows.push((t, x, p));
                        }
                    }
                }
                Ok(vec![Output::text(
                    "birth_death.csv",
                    to_csv_with_header(&["t", "x", "p"], &rows)?,
                )])
            }
        }
    }
}

fn growth_outputs(curve: &GrowthCurve) -> Result<Vec<Output>> {
    let h = &curve.horizons;
    let mut summary = serde_json::Map::new();
    if h.len() >= 2 {
        let (first, last) = (h[0], h[h.len() - 1]);
        if let Ok(r) = curve.ratio(last, first) {
            summary.insert("ratio".into(), serde_json::to_value(r)?);
        }
        summary.insert(
            "increment".into(),
            serde_json::to_value(curve.increment(last, first)?)?,
        );
    }
    Ok(vec![
        Output::text("growth.csv", curve.to_csv()?),
        Output::text("records.jsonl", curve.to_jsonl()),
        Output::json("growth_summary.json", &summary)?,
    ])
}

/// Runs `$body` with `$sp` bound to the fastest walk space for `$built`.
macro_rules! with_space {
    ($family:expr, $built:expr, |$sp:ident| $body:expr) => {{
        match ($family, $built) {
            (
                FamilySpec::Comb {
                    profile,
                    base_dimension: 1,
                },
                _,
            ) if !matches!(profile, Profile::Full) => {
                let comb = CombOracle::new(CombSpec {
                    profile: profile.clone(),
                    base_dimension: 1,
                })?;
                let $sp = CombSpace::new(&comb)?;
                $body
            }
            (_, BuiltFamily::Graph(g)) => {
                let $sp = IndexSpace::new(g);
                $body
            }
            (_, BuiltFamily::Oracle { oracle, .. }) => {
                let $sp = OracleSpace::new(oracle.as_ref());
                $body
            }
        }
    }};
}

fn dump_paths<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    top: u64,
    reps: u64,
    seed: u64,
    lanes: &[u64],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for k in 0..reps {
        let stream = RngStream::new(seed, k);
        for &lane in lanes {
            let path = walk(space, o, top, &mut stream.lane(lane))?;
            let verts: Vec<Vertex> = path.into_iter().map(|s| space.vertex(s)).collect();
            out.extend(encode_path(&verts));
        }
    }
    Ok(out)
}

fn run_growth(
    family: &FamilySpec,
    horizons: &[u64],
    walkers: Walkers,
    replicates: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<Output>> {
    let built = family.build(seed, opts.vertex_cap)?;
    let o = built.root();
    with_space!(family, &built, |sp| {
        let curve = match walkers {
            Walkers::Pair => {
                collision_growth_curve(&sp, &o, horizons, replicates, seed, opts.exec)?
            }
            Walkers::Triple => triple_growth_curve(&sp, &o, horizons, replicates, seed, opts.exec)?,
        };
        let mut out = growth_outputs(&curve)?;
        if opts.dump_paths {
            let lanes: &[u64] = match walkers {
                Walkers::Pair => &[LANE_X, LANE_Y],
                Walkers::Triple => &[LANE_X, LANE_Y, crate::walks::LANE_W],
            };
            let top = *horizons.last().expect("validated");
            out.push(Output {
                name: "paths.bin".into(),
                bytes: dump_paths(&sp, &o, top, replicates, seed, lanes)?,
            });
        }
        Ok(out)
    })
}

#[derive(Serialize)]
struct SetRow<'a> {
    target: &'a str,
    estimate: f64,
    standard_error: f64,
    ci_low: f64,
    ci_high: f64,
    replicates: u64,
    window_start: u64,
    window_end: u64,
    truncated: bool,
}

fn run_sets(
    family: &FamilySpec,
    targets: &[TargetSet],
    horizon: &HorizonPolicy,
    replicates: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<Output>> {
    let resolved = match family {
        FamilySpec::Comb {
            profile,
            base_dimension: 1,
        } => {
            let comb = CombOracle::new(CombSpec {
                profile: profile.clone(),
                base_dimension: 1,
            })?;
            targets
                .iter()
                .map(|t| {
                    SetCollisionSpec {
                        target: t.clone(),
                        horizon: horizon.clone(),
                    }
                    .resolve(TargetContext::Comb(&comb))
                })
                .collect::<Result<Vec<_>>>()?
        }
        FamilySpec::SphericalTree { lengths, depth_cap } => {
            let tree = SphericalTreeOracle::new(SphericalTreeSpec {
                lengths: lengths.clone(),
                depth_cap: *depth_cap,
            })?;
            targets
                .iter()
                .map(|t| {
                    SetCollisionSpec {
                        target: t.clone(),
                        horizon: horizon.clone(),
                    }
                    .resolve(TargetContext::Tree(&tree))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            return Err(Error::InvalidSpec(
                "set-collision targets are defined on combs over ℤ and spherical trees".into(),
            ))
        }
    };
    let built = family.build(seed, opts.vertex_cap)?;
    let o = built.root();
    let results = with_space!(family, &built, |sp| shared_set_collisions_in(
        &sp, &o, &resolved, replicates, seed, opts.exec
    )?
    .results);
    let rows: Vec<SetRow> = results
        .iter()
        .map(|r| SetRow {
            target: &r.label,
            estimate: r.estimate.estimate,
            standard_error: r.estimate.standard_error,
            ci_low: r.estimate.ci_low,
            ci_high: r.estimate.ci_high,
            replicates: r.estimate.replicates,
            window_start: r.window_start,
            window_end: r.window_end,
            truncated: r.truncated,
        })
        .collect();
    Ok(vec![Output::text("set_collision.csv", to_csv(&rows)?)])
}

//! Config files of the non-experiment subcommands and their runners.

use collide::criterion::{green_ratio_scan, slab_region, SlopeThresholds};
use collide::experiments::{
    collision_growth_curve, run_replicates, triple_growth_curve, EstimatorResult, GrowthCurve,
    Output, RunOptions, Walkers, DEFAULT_REPLICATES, DEFAULT_SEED, MAX_FAILURE_RATE,
};
use collide::families::{BuiltFamily, CombOracle, CombSpec, FamilySpec, Profile};
use collide::graph::{ball_region, extract_region};
use collide::potential::{green_kernel_with, GreenOptions};
use collide::walks::{
    encode_path, killed_pair_collisions, walk, CollisionOptions, CollisionRecord, CombSpace,
    IndexSpace, OracleSpace, RngStream, WalkSpace, LANE_W, LANE_X, LANE_Y,
};
use collide::{Error, FiniteGraph, FiniteRegion, NeighborOracle, Result, Vertex};
use serde::{Deserialize, Serialize};

/// Finite region around the family root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    /// `|x| ≤ r` on combs over ℤ and on ℤ; max norm over ℤ².
    Slab { r: u64 },
    /// Graph-distance ball of radius `r`.
    Ball { r: u64 },
}

impl RegionSpec {
    fn region(
        &self,
        oracle: &dyn NeighborOracle,
        root: Vertex,
        cap: usize,
    ) -> Result<FiniteRegion> {
        match *self {
            RegionSpec::Slab { r } => {
                if matches!(root, Vertex::Tree { .. } | Vertex::Index { .. }) {
                    return Err(Error::InvalidSpec(
                        "slab regions need a comb or lattice family".into(),
                    ));
                }
                Ok(slab_region(root, r))
            }
            RegionSpec::Ball { r } => ball_region(oracle, root, r, cap),
        }
    }
}

/// Builds the family and, if requested, cuts out a region. Sampled
/// families without a region are returned whole.
fn materialize(
    family: &FamilySpec,
    region: Option<&RegionSpec>,
    seed: u64,
    cap: usize,
) -> Result<FiniteGraph> {
    let built = family.build(seed, cap)?;
    match (region, built) {
        (None, BuiltFamily::Graph(g)) => Ok(g),
        (None, BuiltFamily::Oracle { .. }) => Err(Error::InvalidSpec(
            "infinite families need a \"region\" to build a finite graph".into(),
        )),
        (Some(r), built) => {
            let root = built.root();
            let region = r.region(built.oracle(), root, cap)?;
            extract_region(built.oracle(), &region, cap)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub family: FamilySpec,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl BuildConfig {
    pub fn resolve(mut self, seed: Option<u64>) -> Self {
        self.seed = seed.or(self.seed).or(Some(DEFAULT_SEED));
        self
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Vec<Output>> {
        let g = materialize(
            &self.family,
            self.region.as_ref(),
            self.seed.unwrap_or(DEFAULT_SEED),
            opts.vertex_cap,
        )?;
        let mut json = g.to_json()?;
        json.push('\n');
        let summary = serde_json::json!({
            "vertices": g.len(),
            "edges": g.edge_count(),
            "interior": g.interior_count(),
            "boundary": g.boundary().len(),
            "root": g.vertex(g.root()),
        });
        Ok(vec![
            Output::text("graph.json", json),
            Output::json("graph_summary.json", &summary)?,
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistConfig {
    pub family: FamilySpec,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    /// Compute the whole Green diagonal (default true).
    #[serde(default)]
    pub diagonal: Option<bool>,
    /// Vertex pairs whose effective resistance is reported.
    #[serde(default)]
    pub pairs: Vec<(Vertex, Vertex)>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ResistConfig {
    pub fn resolve(mut self, seed: Option<u64>) -> Self {
        self.seed = seed.or(self.seed).or(Some(DEFAULT_SEED));
        self.diagonal.get_or_insert(true);
        self
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Vec<Output>> {
        let g = materialize(
            &self.family,
            self.region.as_ref(),
            self.seed.unwrap_or(DEFAULT_SEED),
            opts.vertex_cap,
        )?;
        let index = |v: &Vertex| {
            g.index_of(v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))
        };
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let rep = green_kernel_with(
            &g,
            g.root(),
            &GreenOptions {
                diagonal: self.diagonal.unwrap_or(true),
                pairs,
                cross_check: true,
            },
        )?;
        let mut out = vec![
            Output::text("green.csv", rep.to_csv()?),
            Output::json("potential_summary.json", &rep.summary_json())?,
        ];
        if !rep.resistance_pairs.is_empty() {
            let rows: Vec<_> = rep
                .resistance_pairs
                .iter()
                .map(|p| {
                    (
                        g.vertex(p.u).to_string(),
                        g.vertex(p.v).to_string(),
                        p.resistance,
                    )
                })
                .collect();
            out.push(Output::text(
                "pairs.csv",
                collide::table::to_csv_with_header(&["u", "v", "resistance"], &rows)?,
            ));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    pub family: FamilySpec,
    pub radii: Vec<u64>,
    /// Region shape per radius; slabs by default.
    #[serde(default)]
    pub shape: Option<Shape>,
    #[serde(default)]
    pub slope_bounded: Option<f64>,
    #[serde(default)]
    pub slope_growing: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Slab,
    Ball,
}

impl CriterionConfig {
    pub fn resolve(
        mut self,
        seed: Option<u64>,
        bounded: Option<f64>,
        growing: Option<f64>,
    ) -> Self {
        let d = SlopeThresholds::default();
        self.seed = seed.or(self.seed).or(Some(DEFAULT_SEED));
        self.shape.get_or_insert(Shape::Slab);
        self.slope_bounded = bounded.or(self.slope_bounded).or(Some(d.bounded));
        self.slope_growing = growing.or(self.slope_growing).or(Some(d.growing));
        self
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Vec<Output>> {
        if self.radii.is_empty() {
            return Err(Error::InvalidSpec("radii must be nonempty".into()));
        }
        let d = SlopeThresholds::default();
        let thresholds = SlopeThresholds {
            bounded: self.slope_bounded.unwrap_or(d.bounded),
            growing: self.slope_growing.unwrap_or(d.growing),
        };
        if !(thresholds.bounded <= thresholds.growing) {
            return Err(Error::InvalidSpec(
                "slope thresholds need bounded <= growing".into(),
            ));
        }
        let built = self
            .family
            .build(self.seed.unwrap_or(DEFAULT_SEED), opts.vertex_cap)?;
        let root = built.root();
        let shape = match self.shape.unwrap_or(Shape::Slab) {
            Shape::Slab => |r| RegionSpec::Slab { r },
            Shape::Ball => |r| RegionSpec::Ball { r },
        };
        let regions = self
            .radii
            .iter()
            .map(|&r| Ok((r, shape(r).region(built.oracle(), root, opts.vertex_cap)?)))
            .collect::<Result<Vec<_>>>()?;
        let scan = green_ratio_scan(
            built.oracle(),
            &regions,
            thresholds,
            opts.vertex_cap,
            opts.exec,
        );
        if scan.ok_rows().next().is_none() {
            let why = scan
                .rows
                .iter()
                .find_map(|r| r.error.clone())
                .unwrap_or_default();
            return Err(Error::InvalidSpec(format!("every radius failed: {why}")));
        }
        Ok(vec![
            Output::text("scan.csv", scan.to_csv()?),
            Output::json("verdict.json", &scan.verdict_json())?,
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollideConfig {
    pub family: FamilySpec,
    /// Start vertex of every walker (the family root by default).
    #[serde(default)]
    pub start: Option<Vertex>,
    pub horizons: Vec<u64>,
    #[serde(default)]
    pub walkers: Walkers,
    /// Kill walks on leaving this region; edge collisions and exit times are
    /// then recorded.
    #[serde(default)]
    pub region: Option<RegionSpec>,
    /// Also count undirected same-edge crossings (killed runs).
    #[serde(default)]
    pub undirected_edges: bool,
    #[serde(default)]
    pub replicates: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CollideConfig {
    pub fn resolve(mut self, seed: Option<u64>, replicates: Option<u64>) -> Self {
        self.seed = seed.or(self.seed).or(Some(DEFAULT_SEED));
        self.replicates = replicates.or(self.replicates).or(Some(DEFAULT_REPLICATES));
        self
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Vec<Output>> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let reps = self.replicates.unwrap_or(DEFAULT_REPLICATES);
        if self.region.is_some() {
            return self.run_killed(seed, reps, opts);
        }
        if self.undirected_edges {
            return Err(Error::InvalidSpec(
                "undirected_edges applies to killed runs (set a region)".into(),
            ));
        }
        let built = self.family.build(seed, opts.vertex_cap)?;
        let o = self.start.unwrap_or_else(|| built.root());
        let comb = match &self.family {
            FamilySpec::Comb {
                profile,
                base_dimension: 1,
            } if !matches!(profile, Profile::Full) => Some(CombOracle::new(CombSpec {
                profile: profile.clone(),
                base_dimension: 1,
            })?),
            _ => None,
        };
        match (&comb, &built) {
            (Some(c), _) => self.free_run(&CombSpace::new(c)?, &o, reps, seed, opts),
            (None, BuiltFamily::Graph(g)) => {
                self.free_run(&IndexSpace::new(g), &o, reps, seed, opts)
            }
            (None, BuiltFamily::Oracle { oracle, .. }) => {
                self.free_run(&OracleSpace::new(oracle.as_ref()), &o, reps, seed, opts)
            }
        }
    }

    fn free_run<S: WalkSpace>(
        &self,
        sp: &S,
        o: &Vertex,
        reps: u64,
        seed: u64,
        opts: &RunOptions,
    ) -> Result<Vec<Output>> {
        let curve = match self.walkers {
            Walkers::Pair => collision_growth_curve(sp, o, &self.horizons, reps, seed, opts.exec)?,
            Walkers::Triple => triple_growth_curve(sp, o, &self.horizons, reps, seed, opts.exec)?,
        };
        let mut out = curve_outputs(&curve)?;
        if opts.dump_paths {
            let lanes: &[u64] = match self.walkers {
                Walkers::Pair => &[LANE_X, LANE_Y],
                Walkers::Triple => &[LANE_X, LANE_Y, LANE_W],
            };
            let top = *self.horizons.last().expect("validated by the curve");
            let mut bytes = Vec::new();
            for k in 0..reps {
                let stream = RngStream::new(seed, k);
                for &lane in lanes {
                    let path = walk(sp, o, top, &mut stream.lane(lane))?;
                    let verts: Vec<Vertex> = path.into_iter().map(|s| sp.vertex(s)).collect();
                    bytes.extend(encode_path(&verts));
                }
            }
            out.push(Output {
                name: "paths.bin".into(),
                bytes,
            });
        }
        Ok(out)
    }

    fn run_killed(&self, seed: u64, reps: u64, opts: &RunOptions) -> Result<Vec<Output>> {
        if self.walkers != Walkers::Pair {
            return Err(Error::InvalidSpec("killed runs use two walkers".into()));
        }
        if opts.dump_paths {
            return Err(Error::InvalidSpec(
                "--dump-paths is not available for killed runs".into(),
            ));
        }
        let g = materialize(&self.family, self.region.as_ref(), seed, opts.vertex_cap)?;
        let o = match &self.start {
            Some(v) => g
                .index_of(v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))?,
            None => g.root(),
        };
        let top = *self
            .horizons
            .last()
            .ok_or_else(|| Error::InvalidSpec("horizons must be nonempty".into()))?;
        let copts = CollisionOptions {
            checkpoints: self.horizons.clone(),
            undirected_edges: self.undirected_edges,
            ..Default::default()
        };
        let (records, failures) = run_replicates(reps, opts.exec, MAX_FAILURE_RATE, |k| {
            killed_pair_collisions(&g, o, top, RngStream::new(seed, k), &copts)
        })?;
        let column = |f: fn(&CollisionRecord) -> u64| {
            records.iter().map(|r| f(r) as f64).collect::<Vec<_>>()
        };
        let mut z = EstimatorResult::from_values("Z_B", &column(|r| r.z), seed)?;
        let mut edge_z = EstimatorResult::from_values("edge Z_B", &column(|r| r.edge_z), seed)?;
        z.failures = failures;
        edge_z.failures = failures;
        let mut jsonl = String::new();
        for r in &records {
            jsonl.push_str(&r.to_jsonl());
            jsonl.push('\n');
        }
        let rows = [&z, &edge_z];
        Ok(vec![
            Output::text("records.jsonl", jsonl),
            Output::text("killed.csv", collide::table::to_csv(&rows)?),
        ])
    }
}

fn curve_outputs(curve: &GrowthCurve) -> Result<Vec<Output>> {
    Ok(vec![
        Output::text("growth.csv", curve.to_csv()?),
        Output::text("records.jsonl", curve.to_jsonl()),
    ])
}

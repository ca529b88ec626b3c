use super::rng::{RngStream, LANE_W, LANE_X, LANE_Y};
use super::space::{IndexSpace, WalkSpace};
use crate::graph::{FiniteGraph, Vertex};
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;

/// Outcome of one paired (or tripled) walk run. Collisions are counted from
/// `t = 0` inclusive.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CollisionRecord {
    pub stream_id: u64,
    pub horizon: u64,
    /// `#{t ≤ T : X_t = Y_t}` (for killed runs: at an interior vertex).
    pub z: u64,
    /// `#{t < T : X_t = Y_t, X_{t+1} = Y_{t+1}}`.
    pub edge_z: u64,
    /// `#{t < T : {X_t, X_{t+1}} = {Y_t, Y_{t+1}}}`, when requested.
    pub undirected_edge_z: Option<u64>,
    pub last_collision_time: Option<u64>,
    /// Time by which both killed walkers were absorbed.
    pub exit_time: Option<u64>,
    /// Absorption time of each killed walker.
    pub exit_times: Option<[Option<u64>; 2]>,
    pub collision_times: Option<Vec<u64>>,
    /// `(T_c, Z(T_c))` for each requested checkpoint; for triple runs the
    /// counts are triple collisions.
    pub checkpoints: Vec<(u64, u64)>,
    /// `#{t ≤ T : X_t = Y_t = W_t}` for triple runs.
    pub triple_z: Option<u64>,
}

/// Frozen JSON-lines record layout.
#[derive(Serialize)]
struct JsonlRecord {
    stream_id: u64,
    #[serde(rename = "Z")]
    z: u64,
    #[serde(rename = "edgeZ")]
    edge_z: u64,
    exit_time: Option<u64>,
    last_collision_time: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    triple_z: Option<u64>,
}

impl CollisionRecord {
    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(&JsonlRecord {
            stream_id: self.stream_id,
            z: self.z,
            edge_z: self.edge_z,
            exit_time: self.exit_time,
            last_collision_time: self.last_collision_time,
            triple_z: self.triple_z,
        })
        .expect("record serializes")
    }

    /// Count at checkpoint `t`, if it was requested.
    pub fn at(&self, t: u64) -> Option<u64> {
        self.checkpoints.iter().find(|c| c.0 == t).map(|c| c.1)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CollisionOptions {
    /// Sorted times `T_c ≤ T` at which the running count is recorded.
    pub checkpoints: Vec<u64>,
    pub record_times: bool,
    /// Also count undirected same-edge crossings.
    pub undirected_edges: bool,
}

impl CollisionOptions {
    pub fn with_checkpoints(checkpoints: Vec<u64>) -> Self {
        CollisionOptions {
            checkpoints,
            ..Default::default()
        }
    }

    fn validate(&self, horizon: u64) -> Result<()> {
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec(
                "checkpoints must increase strictly".into(),
            ));
        }
        if self.checkpoints.last().is_some_and(|&c| c > horizon) {
            return Err(Error::InvalidSpec("checkpoint beyond the horizon".into()));
        }
        Ok(())
    }
}

/// Trajectory `X_0..X_T` of a simple random walk.
pub fn walk<S: WalkSpace, R: Rng + ?Sized>(
    space: &S,
    start: &Vertex,
    horizon: u64,
    rng: &mut R,
) -> Result<Vec<S::State>> {
    let mut x = space.locate(start)?;
    let mut out = Vec::with_capacity(horizon as usize + 1);
    out.push(x);
    for _ in 0..horizon {
        x = space.step(x, rng)?;
        out.push(x);
    }
    Ok(out)
}

/// Drives two independent walkers from `a` and `b` for `t = 0..=T`, calling
/// `visit(t, X_t, Y_t)`; stops early when `visit` returns false.
pub fn run_pair<S, F>(
    space: &S,
    a: &Vertex,
    b: &Vertex,
    horizon: u64,
    stream: RngStream,
    mut visit: F,
) -> Result<()>
where
    S: WalkSpace,
    F: FnMut(u64, S::State, S::State) -> bool,
{
    let mut rx = stream.lane(LANE_X);
    let mut ry = stream.lane(LANE_Y);
    let mut x = space.locate(a)?;
    let mut y = space.locate(b)?;
    for t in 0..=horizon {
        if !visit(t, x, y) || t == horizon {
            break;
        }
        x = space.step(x, &mut rx)?;
        y = space.step(y, &mut ry)?;
    }
    Ok(())
}

struct Counter<'a> {
    options: &'a CollisionOptions,
    next_checkpoint: usize,
    record: CollisionRecord,
    times: Vec<u64>,
}

impl<'a> Counter<'a> {
    fn new(options: &'a CollisionOptions, stream_id: u64, horizon: u64) -> Self {
        Counter {
            options,
            next_checkpoint: 0,
            record: CollisionRecord {
                stream_id,
                horizon,
                undirected_edge_z: options.undirected_edges.then_some(0),
                ..Default::default()
            },
            times: Vec::new(),
        }
    }

    #[inline]
    fn hit(&mut self, t: u64) {
        self.record.z += 1;
        self.record.last_collision_time = Some(t);
        if self.options.record_times {
            self.times.push(t);
        }
    }

    #[inline]
    fn checkpoint(&mut self, t: u64, count: u64) {
        while self.options.checkpoints.get(self.next_checkpoint) == Some(&t) {
            self.record.checkpoints.push((t, count));
            self.next_checkpoint += 1;
        }
    }

    fn finish(mut self) -> CollisionRecord {
        if self.options.record_times {
            self.record.collision_times = Some(self.times);
        }
        self.record
    }
}

/// Vertex and edge collisions of two independent walks up to `T`.
pub fn pair_collisions<S: WalkSpace>(
    space: &S,
    a: &Vertex,
    b: &Vertex,
    horizon: u64,
    stream: RngStream,
    options: &CollisionOptions,
) -> Result<CollisionRecord> {
    options.validate(horizon)?;
    let mut c = Counter::new(options, stream.stream, horizon);
    let mut prev: Option<(S::State, S::State)> = None;
    run_pair(space, a, b, horizon, stream, |t, x, y| {
        if let Some((px, py)) = prev {
            if px == py && x == y {
                c.record.edge_z += 1;
            }
            if let Some(u) = c.record.undirected_edge_z.as_mut() {
                if (px == py && x == y) || (px == y && py == x) {
                    *u += 1;
                }
            }
        }
        if x == y {
            c.hit(t);
        }
        let z = c.record.z;
        c.checkpoint(t, z);
        prev = Some((x, y));
        true
    })?;
    Ok(c.finish())
}

/// Pair walk on a finite graph with both walkers absorbed at the boundary.
/// Runs until both are absorbed or `T` steps have passed.
pub fn killed_pair_collisions(
    g: &FiniteGraph,
    o: usize,
    horizon: u64,
    stream: RngStream,
    options: &CollisionOptions,
) -> Result<CollisionRecord> {
    options.validate(horizon)?;
    if o >= g.len() || !g.is_interior(o) {
        return Err(Error::InvalidSpec(format!("start {o} is not interior")));
    }
    let space = IndexSpace::new(g);
    let mut rx = stream.lane(LANE_X);
    let mut ry = stream.lane(LANE_Y);
    let mut c = Counter::new(options, stream.stream, horizon);
    let (mut x, mut y) = (o as u32, o as u32);
    let mut exits: [Option<u64>; 2] = [None, None];
    let mut t = 0u64;
    loop {
        let x_in = exits[0].is_none();
        let y_in = exits[1].is_none();
        if x_in && y_in && x == y {
            c.hit(t);
        }
        let z = c.record.z;
        c.checkpoint(t, z);
        if t == horizon || !(x_in || y_in) {
            break;
        }
        let nx = if x_in { space.step(x, &mut rx)? } else { x };
        let ny = if y_in { space.step(y, &mut ry)? } else { y };
        if x_in && y_in {
            if x == y && nx == ny {
                c.record.edge_z += 1;
            }
            if let Some(u) = c.record.undirected_edge_z.as_mut() {
                if (x == y && nx == ny) || (x == ny && y == nx) {
                    *u += 1;
                }
            }
        }
        t += 1;
        if x_in && !g.is_interior(nx as usize) {
            exits[0] = Some(t);
        }
        if y_in && !g.is_interior(ny as usize) {
            exits[1] = Some(t);
        }
        x = nx;
        y = ny;
    }
    // checkpoints after absorption keep the final count
    let z = c.record.z;
    for &cp in &options.checkpoints[c.next_checkpoint..] {
        c.record.checkpoints.push((cp, z));
    }
    c.next_checkpoint = options.checkpoints.len();
    let mut rec = c.finish();
    rec.exit_times = Some(exits);
    rec.exit_time = match exits {
        [Some(a), Some(b)] => Some(a.max(b)),
        _ => None,
    };
    Ok(rec)
}

/// Counts `t` with `X_t = Y_t = W_t` for three independent walks from `o`.
/// `z` and `edge_z` of the record refer to the pair `(X, Y)`.
pub fn triple_collisions<S: WalkSpace>(
    space: &S,
    o: &Vertex,
    horizon: u64,
    stream: RngStream,
    options: &CollisionOptions,
) -> Result<CollisionRecord> {
    options.validate(horizon)?;
    let mut rx = stream.lane(LANE_X);
    let mut ry = stream.lane(LANE_Y);
    let mut rw = stream.lane(LANE_W);
    let mut c = Counter::new(options, stream.stream, horizon);
    let start = space.locate(o)?;
    let (mut x, mut y, mut w) = (start, start, start);
    let mut triple = 0u64;
    for t in 0..=horizon {
        if x == y {
            c.record.z += 1;
            if y == w {
                triple += 1;
                c.record.last_collision_time = Some(t);
                if options.record_times {
                    c.times.push(t);
                }
            }
        }
        c.checkpoint(t, triple);
        if t == horizon {
            break;
        }
        let nx = space.step(x, &mut rx)?;
        let ny = space.step(y, &mut ry)?;
        w = space.step(w, &mut rw)?;
        if x == y && nx == ny {
            c.record.edge_z += 1;
        }
        x = nx;
        y = ny;
    }
    let mut rec = c.finish();
    rec.triple_z = Some(triple);
    Ok(rec)
}

/// Binary dump of a trajectory: `u64` little-endian vertex count, then per
/// vertex a `u16` little-endian byte length and the UTF-8 vertex encoding.
pub fn encode_path(path: &[Vertex]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + path.len() * 10);
    out.extend_from_slice(&(path.len() as u64).to_le_bytes());
    for v in path {
        let s = v.to_string();
        out.extend_from_slice(&(s.len() as u16).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_region, FiniteRegion, LatticeOracle};
    use crate::walks::OracleSpace;

    fn k2() -> FiniteGraph {
        FiniteGraph::from_index_edges(2, &[(0, 1)], 0).unwrap()
    }

    #[test]
    fn zero_horizon() {
        let line = LatticeOracle::line();
        let sp = OracleSpace::new(&line);
        let o = Vertex::lattice(0, 0);
        let r = pair_collisions(&sp, &o, &o, 0, RngStream::new(1, 0), &Default::default()).unwrap();
        assert_eq!((r.z, r.edge_z), (1, 0));
        let mut rng = RngStream::new(1, 0).lane(0);
        assert_eq!(walk(&sp, &o, 0, &mut rng).unwrap(), vec![o]);
        let t = triple_collisions(&sp, &o, 0, RngStream::new(1, 0), &Default::default()).unwrap();
        assert_eq!(t.triple_z, Some(1));
    }

    #[test]
    fn k2_is_forced() {
        let g = k2();
        let sp = IndexSpace::new(&g);
        let a = Vertex::index(0);
        let mut rng = RngStream::new(5, 0).lane(0);
        assert_eq!(walk(&sp, &a, 5, &mut rng).unwrap(), vec![0, 1, 0, 1, 0, 1]);
        let opts = CollisionOptions {
            checkpoints: vec![0, 3, 7],
            record_times: true,
            undirected_edges: true,
        };
        let r = pair_collisions(&sp, &a, &a, 7, RngStream::new(5, 9), &opts).unwrap();
        assert_eq!((r.z, r.edge_z, r.undirected_edge_z), (8, 7, Some(7)));
        assert_eq!(r.checkpoints, vec![(0, 1), (3, 4), (7, 8)]);
        assert_eq!(r.collision_times.unwrap(), (0..8).collect::<Vec<_>>());
        assert_eq!(r.last_collision_time, Some(7));
        // starting on opposite ends the walkers swap every step
        let r = pair_collisions(
            &sp,
            &a,
            &Vertex::index(1),
            4,
            RngStream::new(5, 9),
            &opts_undirected(),
        )
        .unwrap();
        assert_eq!((r.z, r.edge_z, r.undirected_edge_z), (0, 0, Some(4)));
    }

    fn opts_undirected() -> CollisionOptions {
        CollisionOptions {
            undirected_edges: true,
            ..Default::default()
        }
    }

    #[test]
    fn killed_single_vertex() {
        let region = FiniteRegion::new(Vertex::lattice(0, 0), "{0}", |v| {
            *v == Vertex::lattice(0, 0)
        });
        let g = extract_region(&LatticeOracle::line(), &region, 10).unwrap();
        // both walkers leave at once; the edge is shared when they exit on
        // the same side, so E Z̃ = 1/2 = q_0(o,o)
        let mut shared = 0;
        for s in 0..2000 {
            let r = killed_pair_collisions(&g, 0, 100, RngStream::new(3, s), &Default::default())
                .unwrap();
            assert_eq!((r.z, r.exit_time), (1, Some(1)));
            shared += r.edge_z;
        }
        assert!((900..1100).contains(&shared));
    }

    #[test]
    fn records_are_reproducible() {
        let line = LatticeOracle::line();
        let sp = OracleSpace::new(&line);
        let o = Vertex::lattice(0, 0);
        let a = pair_collisions(
            &sp,
            &o,
            &o,
            1000,
            RngStream::new(11, 4),
            &Default::default(),
        )
        .unwrap();
        let b = pair_collisions(
            &sp,
            &o,
            &o,
            1000,
            RngStream::new(11, 4),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.z >= a.edge_z);
        assert_eq!(
            a.to_jsonl(),
            format!(
                "{{\"stream_id\":4,\"Z\":{},\"edgeZ\":{},\"exit_time\":null,\"last_collision_time\":{}}}",
                a.z,
                a.edge_z,
                a.last_collision_time.unwrap()
            )
        );
    }

    #[test]
    fn path_encoding() {
        let bytes = encode_path(&[Vertex::comb(1, 2)]);
        assert_eq!(&bytes[..8], &1u64.to_le_bytes());
        assert_eq!(&bytes[8..10], &5u16.to_le_bytes());
        assert_eq!(&bytes[10..], b"(1,2)");
    }
}

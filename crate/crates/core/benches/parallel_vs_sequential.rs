//! Replicate loops under the sequential fallback and the rayon pool.
//!
//! Both modes produce identical numbers; only wall time differs.

use collide::experiments::{collision_growth_curve, kolmogorov_check};
use collide::families::{CombOracle, CombSpec, OffspringSpec};
use collide::graph::{LatticeOracle, Vertex};
use collide::par::Execution;
use collide::walks::{CombSpace, OracleSpace};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn comb_growth(c: &mut Criterion) {
    let comb = CombOracle::new(CombSpec::wedge(2.0)).unwrap();
    let space = CombSpace::new(&comb).unwrap();
    let o = Vertex::comb(0, 0);
    let mut group = c.benchmark_group("comb_growth_curve");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| collision_growth_curve(&space, &o, &[1_000, 10_000], 256, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn line_growth(c: &mut Criterion) {
    let line = LatticeOracle::line();
    let space = OracleSpace::new(&line);
    let o = Vertex::lattice(0, 0);
    let mut group = c.benchmark_group("line_growth_curve");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| collision_growth_curve(&space, &o, &[500, 5_000], 256, 2, exec).unwrap())
        });
    }
    group.finish();
}

fn kolmogorov(c: &mut Criterion) {
    let law = OffspringSpec::geometric_half();
    let mut group = c.benchmark_group("kolmogorov");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| kolmogorov_check(&law, 100, 20_000, 3, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, comb_growth, line_growth, kolmogorov);
criterion_main!(benches);

//! Property tests for structural invariants of the exact and Monte Carlo
//! layers.

use std::collections::BTreeSet;

use collide::criterion::slab_region;
use collide::experiments::collision_growth_curve;
use collide::families::{CombOracle, CombSpec, OffspringSpec};
use collide::graph::{extract_region, LatticeOracle, DEFAULT_VERTEX_CAP};
use collide::par::Execution;
use collide::potential::{effective_resistance, green_kernel, killed_densities};
use collide::walks::OracleSpace;
use collide::{FiniteGraph, Vertex};
use proptest::prelude::*;

/// Connected graph on `n` vertices: a random recursive tree plus extra chords.
fn connected_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (3usize..12).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
        let chords = proptest::collection::vec((0..n, 0..n), 0..n);
        (Just(n), parents, chords).prop_map(|(n, parents, chords)| {
            let mut edges = BTreeSet::new();
            for (i, p) in parents.into_iter().enumerate() {
                edges.insert((p, i + 1));
            }
            for (a, b) in chords {
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            (n, edges.into_iter().collect())
        })
    })
}

fn resistance(g: &FiniteGraph, u: usize, v: usize) -> f64 {
    effective_resistance(g, &[u], &[v]).unwrap().resistance
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resistance_is_a_metric((n, edges) in connected_graph(), pick in any::<[prop::sample::Index; 3]>()) {
        let g = FiniteGraph::from_index_edges(n, &edges, 0).unwrap();
        let [u, v, w] = pick.map(|i| i.index(n));
        prop_assume!(u != v && v != w && u != w);
        let (uv, vu) = (resistance(&g, u, v), resistance(&g, v, u));
        prop_assert!((uv - vu).abs() < 1e-10);
        prop_assert!(uv <= resistance(&g, u, w) + resistance(&g, w, v) + 1e-10);
        prop_assert!(uv <= (g.distance(u) + g.distance(v)) as f64 + 1e-10);
    }

    #[test]
    fn adding_an_edge_never_raises_resistance(
        (n, edges) in connected_graph(),
        extra in any::<(prop::sample::Index, prop::sample::Index)>(),
        pick in any::<(prop::sample::Index, prop::sample::Index)>(),
    ) {
        let (a, b) = (extra.0.index(n), extra.1.index(n));
        let (u, v) = (pick.0.index(n), pick.1.index(n));
        prop_assume!(a != b && u != v && !edges.contains(&(a.min(b), a.max(b))));
        let before = FiniteGraph::from_index_edges(n, &edges, 0).unwrap();
        let mut more = edges.clone();
        more.push((a.min(b), a.max(b)));
        let after = FiniteGraph::from_index_edges(n, &more, 0).unwrap();
        prop_assert!(resistance(&after, u, v) <= resistance(&before, u, v) + 1e-10);
    }

    #[test]
    fn killed_mass_is_substochastic(
        (n, edges) in connected_graph(),
        mask in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let mut interior: Vec<bool> = mask[..n].to_vec();
        interior[0] = true;
        prop_assume!(interior.iter().any(|&b| !b));
        let g = FiniteGraph::from_index_edges(n, &edges, 0)
            .unwrap()
            .with_interior(interior)
            .unwrap();
        let trace = killed_densities(&g, 0, 60, true, Execution::Sequential).unwrap();
        prop_assert!(trace.survival[0] <= 1.0 + 1e-12);
        for w in trace.survival.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for dist in trace.distributions.as_ref().unwrap() {
            prop_assert!(dist.iter().all(|&p| p >= 0.0));
        }
        // Partial sums of the return density approach the Green function
        // from below.
        let green = green_kernel(&g, 0).unwrap().green_root;
        prop_assert!(trace.partial_green(60) <= green * (1.0 + 1e-9));
    }

    #[test]
    fn comb_slab_green_ignores_teeth(alpha in 0.0f64..3.0, r in 0u64..12) {
        let comb = CombOracle::new(CombSpec::wedge(alpha)).unwrap();
        let g = extract_region(&comb, &slab_region(Vertex::comb(0, 0), r), DEFAULT_VERTEX_CAP)
            .unwrap();
        let report = green_kernel(&g, g.root()).unwrap();
        prop_assert!((report.green_root - (r as f64 + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn green_grows_with_the_region(r in 0u64..10, dr in 1u64..6) {
        let plane = LatticeOracle::plane();
        let o = Vertex::lattice(0, 0);
        let small = extract_region(&plane, &slab_region(o, r), DEFAULT_VERTEX_CAP).unwrap();
        let large = extract_region(&plane, &slab_region(o, r + dr), DEFAULT_VERTEX_CAP).unwrap();
        let gs = green_kernel(&small, small.root()).unwrap().green_root;
        let gl = green_kernel(&large, large.root()).unwrap().green_root;
        prop_assert!(gs < gl);
    }

    #[test]
    fn power_tail_laws_are_critical(gamma in 0.2f64..2.0, truncation in 20usize..2000) {
        let law = OffspringSpec::power_tail(gamma, truncation).unwrap();
        prop_assert!((law.mean() - 1.0).abs() < 1e-9);
        prop_assert!((law.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn worker_count_never_changes_counts(seed in any::<u64>(), threads in 2usize..9) {
        let line = LatticeOracle::line();
        let space = OracleSpace::new(&line);
        let o = Vertex::lattice(0, 0);
        let run = |exec| collision_growth_curve(&space, &o, &[50, 400], 64, seed, exec).unwrap();
        let seq = run(Execution::Sequential);
        let par = run(Execution::Threads(threads));
        prop_assert_eq!(seq.counts, par.counts);
    }
}

//! Randomized cross-module invariants. Each property pits an implementation
//! against an independent oracle (BFS, brute force, or a closed form) on
//! generated inputs.

mod common;

use proptest::prelude::*;

use netfail::cascade;
use netfail::frontal;
use netfail::graph::Graph;
use netfail::markov::{self, RateMatrix, StateVector};
use netfail::matrix::Matrix;
use netfail::protection;
use netfail::random_graph;
use netfail::spectral;

fn arb_graph(max_n: usize, p: f64) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>())
        .prop_map(move |(n, seed)| random_graph::gnp(n, p, seed).expect("valid gnp"))
}

fn arb_connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>()).prop_map(move |(n, seed)| {
        let mut seed = seed;
        loop {
            let g = random_graph::gnp(n, 0.5, seed).expect("valid gnp");
            if g.is_connected() {
                return g;
            }
            seed = seed.wrapping_add(1);
        }
    })
}

/// Row-stochastic-complement generator on `n` states from a seed.
fn arb_generator(max_n: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n, any::<u64>()).prop_map(move |(n, seed)| {
        let mut m = Matrix::zeros(n, n);
        let mut state = seed | 1;
        for i in 0..n {
            let mut off_sum = 0.0;
            for j in 0..n {
                if i != j {
                    // splitmix-style scramble is overkill here; a simple LCG
                    // spreads rates well enough for a test generator.
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let r = (state >> 11) as f64 / (1u64 << 53) as f64;
                    m[(i, j)] = 2.0 * r;
                    off_sum += m[(i, j)];
                }
            }
            m[(i, i)] = -off_sum;
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal(g in arb_graph(12, 0.4)) {
        let a = g.adjacency_matrix();
        prop_assert_eq!(a.max_asymmetry(), 0.0);
        for i in 0..g.n() {
            prop_assert_eq!(a[(i, i)], 0.0);
        }
    }

    #[test]
    fn gnp_is_deterministic_and_monotone_in_p(
        n in 2usize..30,
        seed in any::<u64>(),
        (lo, hi) in (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| (a.min(b), a.max(b))),
    ) {
        let g1 = random_graph::gnp(n, lo, seed).unwrap();
        let g2 = random_graph::gnp(n, lo, seed).unwrap();
        prop_assert_eq!(g1.edges(), g2.edges());
        // Each pair uses one fixed uniform draw, so raising p only adds edges.
        let bigger = random_graph::gnp(n, hi, seed).unwrap();
        for &(u, v) in g1.edges() {
            prop_assert!(bigger.has_edge(u, v));
        }
    }

    #[test]
    fn cumulative_pattern_equals_bfs_reach(g in arb_graph(12, 0.3), t in 0usize..8) {
        let reach = cascade::cumulative_matrix(&g, t);
        for i in 0..g.n() {
            let dist = g.bfs_distances(i).unwrap();
            for j in 0..g.n() {
                let by_bfs = dist[j].is_some_and(|d| d <= t);
                prop_assert_eq!(reach.is_reachable(i, j), by_bfs, "vertices {} {} t {}", i, j, t);
            }
        }
    }

    #[test]
    fn walk_counts_match_spectral_power(g in arb_graph(8, 0.5), t in 0u32..6) {
        let exact = cascade::walk_count_matrix(&g, t as usize);
        let approx = spectral::spectral_power(&g.adjacency_matrix(), t).unwrap();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let count = u64::try_from(&exact[i][j]).expect("small count");
                let err = (approx[(i, j)] - count as f64).abs();
                prop_assert!(err <= 1e-6 * (count as f64).max(1.0));
            }
        }
    }

    #[test]
    fn line_graph_counts_follow_degrees(g in arb_graph(12, 0.4)) {
        let lg = g.line_graph();
        prop_assert_eq!(lg.n(), g.edge_count());
        let expected: usize = (0..g.n())
            .map(|v| g.degree(v) * g.degree(v).saturating_sub(1) / 2)
            .sum();
        prop_assert_eq!(lg.edge_count(), expected);
    }

    #[test]
    fn cascade_waves_partition_reachable_set(g in arb_graph(12, 0.3), seed_v in 0usize..12) {
        let source = seed_v % g.n();
        let timeline = cascade::simulate_cascade(&g, &[source]).unwrap();
        let dist = g.bfs_distances(source).unwrap();
        let mut seen = vec![false; g.n()];
        for (step, wave) in timeline.waves.iter().enumerate() {
            for &v in wave {
                prop_assert!(!seen[v]);
                seen[v] = true;
                prop_assert_eq!(dist[v], Some(step));
            }
        }
        for v in 0..g.n() {
            prop_assert_eq!(seen[v], dist[v].is_some());
        }
    }

    #[test]
    fn sampled_tree_is_a_spanning_tree(g in arb_connected_graph(10), seed in any::<u64>()) {
        let tree = protection::random_spanning_tree(&g, seed).unwrap();
        let tg = tree.graph();
        prop_assert_eq!(tg.edge_count(), g.n() - 1);
        prop_assert!(tg.is_connected());
        for &(u, v) in tg.edges() {
            prop_assert!(g.has_edge(u, v));
        }
    }

    #[test]
    fn generator_evolution_stays_on_simplex(m in arb_generator(6), t in 0.0f64..5.0) {
        let a = RateMatrix::generator(m).unwrap();
        let pi0 = StateVector::point_mass(a.dim(), 0);
        let pi = markov::evolve_continuous(&pi0, &a, t).unwrap();
        let sum: f64 = pi.probabilities().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        prop_assert!(pi.probabilities().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn evolution_satisfies_semigroup(m in arb_generator(5), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let a = RateMatrix::generator(m).unwrap();
        let pi0 = StateVector::point_mass(a.dim(), 0);
        let direct = markov::evolve_continuous(&pi0, &a, s + t).unwrap();
        let mid = markov::evolve_continuous(&pi0, &a, s).unwrap();
        let stepped = markov::evolve_continuous(&mid, &a, t).unwrap();
        for (x, y) in direct.probabilities().iter().zip(stepped.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn connection_probability_is_monotone(
        p in 1e-6f64..1e-2,
        q in 1e-6f64..1e-2,
        r in 1usize..30,
        k in 1usize..30,
    ) {
        let (lo, hi) = (p.min(q), p.max(q));
        let base = frontal::connection_probability(lo, r, k).unwrap();
        prop_assert!(frontal::connection_probability(hi, r, k).unwrap() >= base);
        prop_assert!(frontal::connection_probability(lo, r + 1, k).unwrap() >= base);
        prop_assert!(frontal::connection_probability(lo, r, k + 1).unwrap() >= base);
    }
}

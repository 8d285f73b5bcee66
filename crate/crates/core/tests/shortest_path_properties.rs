use pathshop::shortest_path::{
    abv_minmax, dijkstra, enumerate_simple_paths, minmax_exact, WeightedArc, WeightedGraph,
};
use pathshop::{Eps, Error, JobId};
use proptest::prelude::*;

/// Arbitrary digraph (cycles and parallel arcs allowed) with `k` weights per arc.
fn graph_strategy(max_n: usize, k: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let arc = (0..n, 0..n, prop::collection::vec(0u64..=15, k));
        prop::collection::vec(arc, 1..=3 * n).prop_map(move |raw| {
            let arcs = raw
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .enumerate()
                .map(|(i, (tail, head, w))| WeightedArc { id: JobId(i as u32 + 1), tail, head, w })
                .collect();
            WeightedGraph::new(n, 0, n - 1, k, arcs).unwrap()
        })
    })
}

fn is_simple_st(g: &WeightedGraph, arcs: &[JobId]) -> bool {
    let by_id = |id: JobId| g.arcs().iter().find(|a| a.id == id).unwrap();
    let mut at = 0;
    let mut seen = vec![false; g.vertex_count()];
    seen[0] = true;
    for &id in arcs {
        let a = by_id(id);
        if a.tail != at || seen[a.head] {
            return false;
        }
        seen[a.head] = true;
        at = a.head;
    }
    at == g.vertex_count() - 1
}

fn fixed_eps() -> impl Strategy<Value = Eps> {
    prop_oneof![Just(Eps::new(1, 10).unwrap()), Just(Eps::new(1, 2).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dijkstra_matches_enumeration(g in graph_strategy(8, 1)) {
        let paths = enumerate_simple_paths(&g, 1_000_000).unwrap();
        match dijkstra(&g) {
            Ok((path, d)) => {
                let best = paths.iter().map(|p| g.path_weights(p)[0]).min().unwrap();
                prop_assert_eq!(d, best);
                prop_assert_eq!(g.path_weights(&path)[0], d);
                prop_assert!(is_simple_st(&g, &path.arc_ids));
            }
            Err(Error::Unreachable) => prop_assert!(paths.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn abv_within_one_plus_eps(g in (2usize..=3).prop_flat_map(|k| graph_strategy(7, k)), eps in fixed_eps()) {
        let exact = minmax_exact(&g, 1_000_000);
        let approx = abv_minmax(&g, eps);
        match (exact, approx) {
            (Ok(exact), Ok(approx)) => {
                prop_assert!(is_simple_st(&g, &approx.path.arc_ids));
                prop_assert_eq!(approx.value, g.path_max(&approx.path));
                prop_assert!(exact.value <= approx.value);
                // value * den <= (den + num) * opt
                prop_assert!(
                    approx.value as u128 * eps.denom() as u128
                        <= (eps.denom() + eps.numer()) as u128 * exact.value as u128,
                    "abv {} exact {} eps {}", approx.value, exact.value, eps
                );
                prop_assert!(approx.lower_bound <= exact.value && exact.value <= approx.upper_bound);
            }
            (Err(Error::Unreachable), Err(Error::Unreachable)) => {}
            (a, b) => return Err(TestCaseError::fail(format!("{a:?} vs {b:?}"))),
        }
    }

    #[test]
    fn abv_single_weight_tracks_dijkstra(g in graph_strategy(7, 1), eps in fixed_eps()) {
        if let Ok((_, d)) = dijkstra(&g) {
            let approx = abv_minmax(&g, eps).unwrap();
            prop_assert!(approx.value as u128 * eps.denom() as u128 <= (eps.denom() + eps.numer()) as u128 * d as u128);
            prop_assert!(d <= approx.value);
        }
    }

    #[test]
    fn abv_is_deterministic_and_accepts_huge_eps(g in graph_strategy(7, 2)) {
        if let Ok(a) = abv_minmax(&g, Eps::default()) {
            prop_assert_eq!(&a, &abv_minmax(&g, Eps::default()).unwrap());
            let loose = abv_minmax(&g, Eps::new(1000, 1).unwrap()).unwrap();
            prop_assert!(is_simple_st(&g, &loose.path.arc_ids));
        }
    }
}

#[test]
fn enumeration_order_is_depth_first_by_arc_id() {
    // s=0 -> 1 (ids 3, 1), 1 -> 2 (id 2), 0 -> 2 (id 4)
    let arcs = [(3, 0, 1), (1, 0, 1), (2, 1, 2), (4, 0, 2)]
        .into_iter()
        .map(|(id, tail, head)| WeightedArc { id: JobId(id), tail, head, w: vec![1] })
        .collect();
    let g = WeightedGraph::new(3, 0, 2, 1, arcs).unwrap();
    let order: Vec<Vec<u32>> = enumerate_simple_paths(&g, 10)
        .unwrap()
        .iter()
        .map(|p| p.arc_ids.iter().map(|a| a.0).collect())
        .collect();
    assert_eq!(order, vec![vec![1, 2], vec![3, 2], vec![4]]);
}

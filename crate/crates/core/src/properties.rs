//! Cross-module invariants checked against the brute-force oracles.

use proptest::prelude::*;

use crate::allocation::allocate_and_prune;
use crate::covering::{
    characteristic_matrix_direct, initial_characteristic_matrix, initial_covering, merge_symbols, reduce_covering,
    MergeMode, MergeSymbol, Reducer,
};
use crate::graph::{
    build_extended_graph, compute_roots, is_simug, parametrized_in_set, EdgeKind, EdgeSet, ExtendedGraph,
    NetworkModelSpec, NodeId, NodeSet,
};
use crate::identifiability::{max_vertex_disjoint_paths, verify_identifiability, ExcitationSet};
use crate::testkit::{
    brute_force_vdp, exhaustive_min_allocation, naive_is_simug, naive_mergeable, naive_roots, random_network,
    RandomNetworkParams,
};
use crate::Method;

fn params(max_nodes: usize) -> impl Strategy<Value = RandomNetworkParams> {
    (2..=max_nodes, 0.1f64..0.6, prop::sample::select(vec![0.0, 0.3, 0.7]), 0usize..=2, any::<u64>()).prop_map(
        |(node_count, edge_probability, fixed_fraction, noise_count, seed)| RandomNetworkParams {
            node_count,
            edge_probability,
            fixed_fraction,
            noise_count,
            seed,
        },
    )
}

fn network(max_nodes: usize) -> impl Strategy<Value = (NetworkModelSpec, ExtendedGraph)> {
    params(max_nodes).prop_map(|p| {
        let spec = random_network(&p);
        let g = build_extended_graph(&spec).unwrap();
        (spec, g)
    })
}

fn subset(g: &ExtendedGraph, mask: u32) -> NodeSet {
    g.vertices().filter(|v| mask & (1 << v.offset()) != 0).collect()
}

fn symbol() -> impl Strategy<Value = MergeSymbol> {
    prop::sample::select(vec![MergeSymbol::One, MergeSymbol::Zero, MergeSymbol::Empty])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn roots_match_closure((_, g) in network(9), mask in any::<u32>()) {
        let vertices = subset(&g, mask);
        let edges: EdgeSet = g.edges().iter().filter(|e| vertices.contains(&e.tail) && vertices.contains(&e.head)).copied().collect();
        prop_assert_eq!(compute_roots(&vertices, &edges), naive_roots(&vertices, &edges));
        prop_assert_eq!(is_simug(&vertices, &edges), naive_is_simug(&vertices, &edges));
    }

    #[test]
    fn parametrized_in_sets((_, g) in network(10)) {
        for j in g.w_nodes() {
            let p = parametrized_in_set(&g, j).unwrap();
            prop_assert!(!p.contains(&j));
            for &i in &p {
                prop_assert_eq!(g.kind(i, j), Some(EdgeKind::Parametrized));
            }
        }
    }

    #[test]
    fn flow_bounds_and_brute_force((_, g) in network(7), ma in any::<u32>(), mb in any::<u32>()) {
        let (a, b) = (subset(&g, ma), subset(&g, mb));
        let flow = max_vertex_disjoint_paths(&g, &a, &b);
        prop_assert!(flow <= a.len().min(b.len()));
        prop_assert!(flow >= a.intersection(&b).count());
        prop_assert_eq!(flow, brute_force_vdp(&g, &a, &b).unwrap());
        let wider: NodeSet = a.iter().copied().chain(g.vertices().take(1)).collect();
        prop_assert!(max_vertex_disjoint_paths(&g, &wider, &b) >= flow);
    }

    #[test]
    fn more_excitation_never_hurts((_, g) in network(10), mask in any::<u32>(), extra in 1usize..=10) {
        let excited: NodeSet = g.w_nodes().filter(|v| mask & (1 << v.offset()) != 0).collect();
        let u = ExcitationSet::new(&g, &excited);
        let before = verify_identifiability(&g, &u);
        let v = NodeId::new(1 + (extra - 1) % g.node_count());
        let after = verify_identifiability(&g, &u.with(v));
        for (x, y) in before.checks.iter().zip(&after.checks) {
            prop_assert!(y.achieved >= x.achieved);
        }
        prop_assert!(!before.overall || after.overall);
    }

    #[test]
    fn lemma2_matches_naive_mergeability((_, g) in network(10)) {
        prop_assume!(g.edge_count() > 0);
        let cov = initial_covering(&g).unwrap();
        let m = initial_characteristic_matrix(&g);
        for (i, ti) in cov.simugs().iter().enumerate() {
            for (j, tj) in cov.simugs().iter().enumerate().filter(|(j, _)| *j != i) {
                prop_assert_eq!(m.get(i, j) == MergeSymbol::One, naive_mergeable(ti, tj), "entry ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn reduction_yields_valid_covering((_, g) in network(12)) {
        prop_assume!(g.edge_count() > 0);
        let start = initial_covering(&g).unwrap().len();
        let mut reducer = Reducer::new(&g).unwrap();
        while reducer.step().unwrap().is_some() {}
        let merges = reducer.merges();
        let cov = reducer.covering().clone();
        prop_assert_eq!(cov.len(), start - merges);
        let edges: EdgeSet = g.edges().iter().copied().collect();
        prop_assert!(cov.validate(&edges).is_ok());
        prop_assert_eq!(&cov, &reduce_covering(&g).unwrap());
    }

    // The merge rules may miss a mergeable pair, but never invent one and
    // never hide a conflict.
    #[test]
    fn merge_algebra_is_conservative((_, g) in network(12)) {
        prop_assume!(g.edge_count() > 0);
        let mut reducer = Reducer::new(&g).unwrap();
        while reducer.step().unwrap().is_some() {
            let direct = characteristic_matrix_direct(reducer.covering());
            for (x, y) in reducer.matrix().rows().iter().flatten().zip(direct.rows().iter().flatten()) {
                prop_assert!(x == y || (*x == MergeSymbol::Empty && *y == MergeSymbol::One));
            }
        }
    }

    #[test]
    fn column_merge_commutes(a in symbol(), b in symbol()) {
        prop_assert_eq!(merge_symbols(a, b, MergeMode::Column), merge_symbols(b, a, MergeMode::Column));
        let zero = MergeSymbol::Zero;
        prop_assert_eq!(merge_symbols(a, zero, MergeMode::Row), zero);
        prop_assert_eq!(merge_symbols(zero, a, MergeMode::Row), zero);
    }

    #[test]
    fn simug_never_worse_than_pseudotree((spec, _) in network(10)) {
        let simug = allocate_and_prune(&spec, Method::Simug).unwrap();
        let baseline = allocate_and_prune(&spec, Method::PseudotreeAll).unwrap();
        prop_assert!(simug.certificate.overall);
        prop_assert!(simug.signal_count() <= baseline.signal_count());
    }

    #[test]
    fn exhaustive_is_a_lower_bound((spec, g) in network(8)) {
        let plan = allocate_and_prune(&spec, Method::Simug).unwrap();
        let best = exhaustive_min_allocation(&g, &spec, plan.signal_count()).unwrap().expect("heuristic plan is feasible");
        prop_assert!(best.len() <= plan.signal_count());
    }
}

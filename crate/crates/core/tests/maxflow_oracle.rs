mod common;

use common::all_assignments;
use fasthash::maxflow::{reduce_energy_to_cut, CutGraph, EnergyInstance};
use fasthash::Error;
use proptest::prelude::*;

fn energy_strategy(max_k: usize) -> impl Strategy<Value = EnergyInstance> {
    (1..=max_k)
        .prop_flat_map(|k| {
            let unary = prop::collection::vec([-8i32..8, -8i32..8], k);
            let pairs = prop::collection::vec((0..k, 0..k, 0i32..8), 0..2 * k);
            (unary, pairs)
        })
        .prop_map(|(unary, pairs)| {
            let unary = unary.iter().map(|u| [u[0] as f64 * 0.5, u[1] as f64 * 0.5]).collect();
            let pairs = pairs
                .into_iter()
                .filter(|&(i, j, _)| i != j)
                .map(|(i, j, v)| (i, j, -(v as f64) * 0.25))
                .collect();
            EnergyInstance::new(unary, pairs).unwrap()
        })
}

proptest! {
    #[test]
    fn every_cut_is_energy_plus_constant(e in energy_strategy(8)) {
        let red = reduce_energy_to_cut(&e).unwrap();
        for z in all_assignments(e.len()) {
            let source_side: Vec<bool> = z.iter().map(|&v| v < 0).collect();
            let cut = red.graph.cut_capacity(&source_side);
            prop_assert!((cut - (e.energy(&z) + red.constant)).abs() < 1e-9);
        }
    }

    #[test]
    fn cut_solution_is_exhaustive_minimum(e in energy_strategy(10)) {
        let (z, value) = reduce_energy_to_cut(&e).unwrap().solve();
        let best = all_assignments(e.len()).map(|z| e.energy(&z)).fold(f64::INFINITY, f64::min);
        prop_assert!((e.energy(&z) - best).abs() < 1e-9);
        prop_assert!((value - best).abs() < 1e-9);
    }

    #[test]
    fn no_arc_has_negative_capacity(e in energy_strategy(10)) {
        let red = reduce_energy_to_cut(&e).unwrap();
        prop_assert!(red.graph.arcs().all(|(_, _, c)| c >= 0.0));
    }
}

#[test]
fn positive_pairwise_term_is_rejected() {
    let err = EnergyInstance::new(vec![[0.0, 0.0]; 2], vec![(0, 1, 0.5)]).unwrap_err();
    assert!(matches!(err, Error::NotSubmodular { i: 0, j: 1, .. }));
}

#[test]
fn textbook_network() {
    // CLRS figure 26.1 with s = 6, t = 7; maximum flow 23
    let mut g = CutGraph::new(4);
    let (s, t) = (g.source(), g.sink());
    for (a, b, c) in [
        (s, 0, 16.0),
        (s, 1, 13.0),
        (1, 0, 4.0),
        (0, 2, 12.0),
        (2, 1, 9.0),
        (1, 3, 14.0),
        (3, 2, 7.0),
        (2, t, 20.0),
        (3, t, 4.0),
    ] {
        g.add_edge(a, b, c, 0.0).unwrap();
    }
    let cut = g.max_flow();
    assert_eq!(cut.flow, 23.0);
    assert_eq!(cut.source_side, vec![true, true, false, true]);
    assert_eq!(g.cut_capacity(&cut.source_side), 23.0);
}

#[test]
fn ties_resolve_to_plus_one() {
    // zero energy everywhere: every assignment is optimal
    let e = EnergyInstance::new(vec![[0.0, 0.0]; 3], vec![]).unwrap();
    assert_eq!(reduce_energy_to_cut(&e).unwrap().solve().0, vec![1, 1, 1]);
}

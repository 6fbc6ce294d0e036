mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{random_tree, POW2};
use shazoo::baselines::{labprop, omv_batch, wta_predict, LabPropOptions};
use shazoo::hinge::forks;
use shazoo::io::{load_edge_list_str, write_edge_list};
use shazoo::spanning::{dfs_linearize, seeded_rng};
use shazoo::{
    predict_batch, run_online, Edge, Label, NodeId, RevealedState, WeightedGraph, WeightedTree,
};

fn random_labels<R: Rng>(n: usize, rng: &mut R) -> Vec<Label> {
    (0..n)
        .map(|_| if rng.gen() { Label::Pos } else { Label::Neg })
        .collect()
}

fn random_train<R: Rng>(labels: &[Label], frac: f64, rng: &mut R) -> (RevealedState, Vec<NodeId>) {
    let n = labels.len();
    let mut s = RevealedState::new(n);
    let mut test = Vec::new();
    for v in 0..n {
        if rng.gen_bool(frac) {
            s.reveal(v, labels[v]).unwrap();
        } else {
            test.push(v);
        }
    }
    (s, test)
}

fn random_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> WeightedGraph {
    let t = random_tree(n, false, 0.0, rng);
    let mut edges: Vec<Edge> = t.edges().to_vec();
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v
            && !edges
                .iter()
                .any(|e| (e.u, e.v) == (u, v) || (e.u, e.v) == (v, u))
        {
            edges.push(Edge::new(u, v, *POW2.choose(rng).unwrap()));
        }
    }
    WeightedGraph::new(n, edges, false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn resistance_adds_along_paths(n in 2usize..40, seed: u64) {
        let mut rng = seeded_rng(seed);
        let t = random_tree(n, false, 0.0, &mut rng);
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let path = t.tree_path(i, j).unwrap();
        let direct: f64 = path
            .windows(2)
            .map(|p| t.graph().edge(t.graph().edge_between(p[0], p[1]).unwrap()).resistance())
            .sum();
        prop_assert_eq!(t.resistance_distance(i, j).unwrap(), direct);
        let k = *path.choose(&mut rng).unwrap();
        prop_assert_eq!(
            t.resistance_distance(i, j).unwrap(),
            t.resistance_distance(i, k).unwrap() + t.resistance_distance(k, j).unwrap()
        );
    }

    #[test]
    fn edge_list_round_trip(n in 2usize..30, extra in 0usize..20, seed: u64) {
        let mut rng = seeded_rng(seed);
        let g = random_graph(n, extra, &mut rng);
        let mut buf = Vec::new();
        write_edge_list(&g, None, &mut buf).unwrap();
        let loaded = load_edge_list_str(std::str::from_utf8(&buf).unwrap(), false).unwrap();
        prop_assert_eq!(loaded.graph.node_count(), n);
        for (a, b) in g.edges().iter().zip(loaded.graph.edges()) {
            let u: NodeId = loaded.ids.name(b.u).parse().unwrap();
            let v: NodeId = loaded.ids.name(b.v).parse().unwrap();
            prop_assert_eq!((a.u, a.v, a.weight), (u, v, b.weight));
        }
    }

    #[test]
    fn each_reveal_adds_at_most_one_fork(n in 1usize..40, seed: u64) {
        let mut rng = seeded_rng(seed);
        let t = random_tree(n, false, 0.0, &mut rng);
        let labels = random_labels(n, &mut rng);
        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut s = RevealedState::new(n);
        let mut before = forks(&t, &s).len();
        for v in order {
            s.reveal(v, labels[v]).unwrap();
            let after = forks(&t, &s).len();
            prop_assert!(after <= before + 1);
            before = after;
        }
    }

    #[test]
    fn shazoo_on_a_line_is_nearest_neighbour(n in 1usize..40, frac in 0.0f64..0.6, seed: u64) {
        let mut rng = seeded_rng(seed);
        let edges: Vec<(NodeId, NodeId, f64)> =
            (1..n).map(|i| (i - 1, i, *POW2.choose(&mut rng).unwrap())).collect();
        let t = WeightedTree::from_triples(n, edges, false).unwrap();
        let labels = random_labels(n, &mut rng);
        let (s, test) = random_train(&labels, frac, &mut rng);
        let line = dfs_linearize(&t, 0).unwrap();
        prop_assert_eq!(
            predict_batch(&t, &s, &test).unwrap(),
            wta_predict(&line, &s, &test).unwrap()
        );
    }

    #[test]
    fn labprop_obeys_the_maximum_principle(n in 2usize..30, extra in 0usize..30, seed: u64) {
        let mut rng = seeded_rng(seed);
        let g = random_graph(n, extra, &mut rng);
        let labels = random_labels(n, &mut rng);
        let (mut s, _) = random_train(&labels, 0.3, &mut rng);
        if s.revealed_count() == 0 {
            s.reveal(0, labels[0]).unwrap();
        }
        let r = labprop(&g, &s, LabPropOptions::default()).unwrap();
        prop_assert!(r.converged);
        let lo = s.iter().map(|(_, y)| y.as_f64()).fold(f64::INFINITY, f64::min);
        let hi = s.iter().map(|(_, y)| y.as_f64()).fold(f64::NEG_INFINITY, f64::max);
        for v in 0..n {
            match s.label(v) {
                Some(y) => prop_assert_eq!(r.values[v], y.as_f64()),
                None => {
                    prop_assert!(r.values[v].abs() <= 1.0);
                    prop_assert!(r.values[v] >= lo - 1e-8 && r.values[v] <= hi + 1e-8);
                }
            }
        }
    }

    #[test]
    fn omv_commutes_with_relabelling(n in 2usize..30, extra in 0usize..30, seed: u64) {
        let mut rng = seeded_rng(seed);
        let g = random_graph(n, extra, &mut rng);
        let labels = random_labels(n, &mut rng);
        let (s, test) = random_train(&labels, 0.4, &mut rng);
        let mut perm: Vec<NodeId> = (0..n).collect();
        perm.shuffle(&mut rng);
        let moved = WeightedGraph::new(
            n,
            g.edges().iter().map(|e| Edge::new(perm[e.u], perm[e.v], e.weight)).collect(),
            false,
        )
        .unwrap();
        let moved_train = RevealedState::from_pairs(n, s.iter().map(|(v, y)| (perm[v], y))).unwrap();
        let moved_test: Vec<NodeId> = test.iter().map(|&v| perm[v]).collect();
        let a = omv_batch(&g, &s, &test).unwrap();
        let b = omv_batch(&moved, &moved_train, &moved_test).unwrap();
        for &v in &test {
            prop_assert_eq!(a.get(v), b.get(perm[v]));
        }
    }

    #[test]
    fn constant_labels_cost_at_most_one_mistake(n in 1usize..40, seed: u64) {
        let mut rng = seeded_rng(seed);
        let t = random_tree(n, false, 0.0, &mut rng);
        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(&mut rng);
        let trace = run_online(&t, &vec![Label::Pos; n], &order).unwrap();
        prop_assert!(trace.mistakes <= 1);
        let trace = run_online(&t, &vec![Label::Neg; n], &order).unwrap();
        prop_assert_eq!(trace.mistakes, 0);
    }
}

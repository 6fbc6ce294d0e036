mod common;

use rand::seq::SliceRandom;
use rand::Rng;

use common::prufer_edges;
use shazoo::spanning::seeded_rng;
use shazoo::{run_online, Label, NodeId, WeightedTree};

const LIGHT: f64 = 0.01;

/// Searches small trees whose cut edges are light for label orders on which
/// the unweighted cut rule errs more often than the weighted one.
#[test]
fn light_cuts_fool_unweighted_mincut() {
    let mut rng = seeded_rng(2024);
    let mut best: Option<(usize, usize, usize)> = None;
    let mut weighted_total = 0;
    let mut unweighted_total = 0;
    for _ in 0..3000 {
        let n = rng.gen_range(4..=10);
        let edges = prufer_edges(n, &mut rng);
        let light: Vec<bool> = edges.iter().map(|_| rng.gen_bool(0.3)).collect();
        let weighted = WeightedTree::from_triples(
            n,
            edges
                .iter()
                .zip(&light)
                .map(|(&(u, v), &l)| (u, v, if l { LIGHT } else { 1.0 })),
            false,
        )
        .unwrap();
        let unweighted =
            WeightedTree::from_triples(n, edges.iter().map(|&(u, v)| (u, v, 1.0)), false).unwrap();

        // Labels flip exactly across light edges.
        let mut labels = vec![Label::Pos; n];
        let mut stack = vec![0];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (&(a, b), &l) in edges.iter().zip(&light) {
                let v = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[v] {
                    seen[v] = true;
                    labels[v] = if l { labels[u].flipped() } else { labels[u] };
                    stack.push(v);
                }
            }
        }

        let mut order: Vec<NodeId> = (0..n).collect();
        order.shuffle(&mut rng);
        let w = run_online(&weighted, &labels, &order).unwrap().mistakes;
        let u = run_online(&unweighted, &labels, &order).unwrap().mistakes;
        weighted_total += w;
        unweighted_total += u;
        if u > w
            && best.map_or(true, |(bn, bu, bw)| {
                u - w > bu - bw || (u - w == bu - bw && n < bn)
            })
        {
            best = Some((n, u, w));
        }
    }
    let (n, u, w) = best.expect("no instance where unweighted mincut does worse");
    println!("widest gap: n={n}, unweighted {u} vs weighted {w} mistakes");
    assert!(
        weighted_total < unweighted_total,
        "{weighted_total} vs {unweighted_total}"
    );
}

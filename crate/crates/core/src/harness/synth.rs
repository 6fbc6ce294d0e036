//! Synthetic planted-cluster trees and graphs.

use std::collections::HashSet;

use rand::Rng;

use crate::audit::{cutsize_report, CutsizeReport};
use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId, WeightedGraph, WeightedTree};
use crate::label::Label;

/// Intra-cluster weights are drawn from `[HEAVY_MIN, 2 * HEAVY_MIN)`.
pub const HEAVY_MIN: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct PlantedTree {
    pub tree: WeightedTree,
    pub labeling: Vec<Label>,
    pub cluster: Vec<usize>,
    pub report: CutsizeReport,
}

struct Backbone {
    edges: Vec<Edge>,
    cluster: Vec<usize>,
    labeling: Vec<Label>,
}

fn block_start(c: usize, n: usize, clusters: usize) -> NodeId {
    c * n / clusters
}

fn check_shape(n: usize, clusters: usize) -> Result<()> {
    if clusters == 0 || n < clusters {
        return Err(Error::Config(format!(
            "need 1 <= clusters <= n, got clusters={clusters}, n={n}"
        )));
    }
    Ok(())
}

/// Random recursive tree inside each contiguous block, blocks joined by a
/// random recursive tree of light edges. Labels alternate with the depth
/// of the block in that cluster tree, so every joining edge is cut.
fn backbone<R: Rng + ?Sized>(n: usize, clusters: usize, light: f64, rng: &mut R) -> Backbone {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut cluster = vec![0; n];
    for c in 0..clusters {
        let (lo, hi) = (block_start(c, n, clusters), block_start(c + 1, n, clusters));
        for v in lo..hi {
            cluster[v] = c;
            if v > lo {
                let u = rng.gen_range(lo..v);
                edges.push(Edge::new(u, v, rng.gen_range(HEAVY_MIN..2.0 * HEAVY_MIN)));
            }
        }
    }
    let mut depth = vec![0usize; clusters];
    for c in 1..clusters {
        let p = rng.gen_range(0..c);
        depth[c] = depth[p] + 1;
        let u = rng.gen_range(block_start(p, n, clusters)..block_start(p + 1, n, clusters));
        let v = rng.gen_range(block_start(c, n, clusters)..block_start(c + 1, n, clusters));
        edges.push(Edge::new(u, v, light));
    }
    let labeling = cluster
        .iter()
        .map(|&c| {
            if depth[c] % 2 == 0 {
                Label::Pos
            } else {
                Label::Neg
            }
        })
        .collect();
    Backbone {
        edges,
        cluster,
        labeling,
    }
}

/// Random tree with `clusters` contiguous blocks of node ids, heavy edges
/// inside blocks and light edges between them whose total weight is at
/// most `phi_w_budget`.
pub fn synth_planted_tree<R: Rng + ?Sized>(
    n: usize,
    clusters: usize,
    phi_w_budget: f64,
    rng: &mut R,
) -> Result<PlantedTree> {
    check_shape(n, clusters)?;
    let cuts = clusters - 1;
    if !(phi_w_budget >= 0.0 && phi_w_budget.is_finite())
        || (cuts > 0 && phi_w_budget < f64::MIN_POSITIVE * cuts as f64)
    {
        return Err(Error::InfeasibleBudget(phi_w_budget));
    }
    let mut light = if cuts == 0 {
        HEAVY_MIN / 2.0
    } else {
        (phi_w_budget / cuts as f64).min(HEAVY_MIN / 2.0)
    };
    while (0..cuts).fold(0.0, |s, _| s + light) > phi_w_budget {
        light = light.next_down();
    }
    let b = backbone(n, clusters, light, rng);
    let tree = WeightedTree::new(WeightedGraph::new(n, b.edges, false)?)?;
    let report = cutsize_report(&tree, &b.labeling)?;
    assert!(report.phi_w <= phi_w_budget);
    Ok(PlantedTree {
        tree,
        labeling: b.labeling,
        cluster: b.cluster,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantedGraphParams {
    pub n: usize,
    pub clusters: usize,
    /// Extra random intra-cluster edges attempted per node.
    pub extra_intra: usize,
    /// Extra random edges between distinct clusters.
    pub extra_cross: usize,
    /// Weight of every inter-cluster edge.
    pub light_weight: f64,
}

impl PlantedGraphParams {
    pub fn new(n: usize, clusters: usize) -> Self {
        PlantedGraphParams {
            n,
            clusters,
            extra_intra: 2,
            extra_cross: n / 10,
            light_weight: 0.1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub graph: WeightedGraph,
    pub labeling: Vec<Label>,
    pub cluster: Vec<usize>,
}

/// Connected graph over a planted-cluster backbone tree, densified with
/// heavy intra-cluster edges and a few light cross-cluster edges.
pub fn synth_planted_graph<R: Rng + ?Sized>(
    p: &PlantedGraphParams,
    rng: &mut R,
) -> Result<PlantedGraph> {
    check_shape(p.n, p.clusters)?;
    if !(p.light_weight > 0.0 && p.light_weight.is_finite()) {
        return Err(Error::Config(format!(
            "bad light weight {}",
            p.light_weight
        )));
    }
    let (n, k) = (p.n, p.clusters);
    let b = backbone(n, k, p.light_weight, rng);
    let mut edges = b.edges;
    let mut seen: HashSet<(NodeId, NodeId)> =
        edges.iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    let mut add = |u: NodeId, v: NodeId, w: f64, edges: &mut Vec<Edge>| {
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push(Edge::new(u, v, w));
        }
    };
    for v in 0..n {
        let c = b.cluster[v];
        let (lo, hi) = (block_start(c, n, k), block_start(c + 1, n, k));
        if hi - lo < 2 {
            continue;
        }
        for _ in 0..p.extra_intra {
            let u = rng.gen_range(lo..hi);
            add(u, v, rng.gen_range(HEAVY_MIN..2.0 * HEAVY_MIN), &mut edges);
        }
    }
    if k > 1 {
        for _ in 0..p.extra_cross {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if b.cluster[u] != b.cluster[v] {
                add(u, v, p.light_weight, &mut edges);
            }
        }
    }
    Ok(PlantedGraph {
        graph: WeightedGraph::new(n, edges, false)?,
        labeling: b.labeling,
        cluster: b.cluster,
    })
}

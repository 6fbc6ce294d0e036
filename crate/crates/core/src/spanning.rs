//! Spanning trees of weighted graphs and depth-first linearization.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, NodeId, WeightedGraph, WeightedTree, NO_NODE};

/// The generator behind every seeded sampling operation: ChaCha with 8 rounds.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    /// Random spanning tree with probability proportional to the product of weights.
    Rst,
    /// Uniform random spanning tree, weights ignored while sampling.
    Nwrst,
    /// Spanning tree minimizing the sum of edge resistances.
    Mst,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::Rst => "rst",
            TreeKind::Nwrst => "nwrst",
            TreeKind::Mst => "mst",
        })
    }
}

impl FromStr for TreeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rst" => Ok(TreeKind::Rst),
            "nwrst" => Ok(TreeKind::Nwrst),
            "mst" => Ok(TreeKind::Mst),
            other => Err(format!("unknown tree kind {other:?} (rst, nwrst, mst)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreeSample {
    pub tree: WeightedTree,
    pub kind: TreeKind,
    pub seed: u64,
    /// Ids of the source-graph edges kept, ascending.
    pub edge_ids: Vec<EdgeId>,
    /// Random-walk steps taken by Wilson's algorithm; 0 for MST.
    pub walk_steps: u64,
}

fn tree_from_edge_ids(
    g: &WeightedGraph,
    mut ids: Vec<EdgeId>,
) -> Result<(WeightedTree, Vec<EdgeId>)> {
    ids.sort_unstable();
    let edges: Vec<Edge> = ids.iter().map(|&id| *g.edge(id)).collect();
    let tree = WeightedTree::new(WeightedGraph::new(g.node_count(), edges, g.is_signed())?)?;
    Ok((tree, ids))
}

fn require_connected(g: &WeightedGraph) -> Result<()> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Wilson's loop-erased random walk sampler rooted at node 0.
///
/// With `use_weights` the walk moves to a neighbour with probability
/// proportional to `|w|`, which yields trees with probability proportional
/// to the product of their edge weights; otherwise every neighbour is
/// equally likely and the tree is uniform. Returns the kept edge ids and
/// the number of walk steps.
pub fn wilson<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
    use_weights: bool,
) -> Result<(Vec<EdgeId>, u64)> {
    require_connected(g)?;
    let n = g.node_count();
    let cumulative: Vec<Vec<f64>> = if use_weights {
        (0..n)
            .map(|u| {
                let mut acc = 0.0;
                g.neighbors(u)
                    .iter()
                    .map(|nb| {
                        acc += nb.weight.abs();
                        acc
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[0] = true;
    let mut steps = 0u64;
    let mut kept = Vec::with_capacity(n - 1);
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbs = g.neighbors(u);
            let slot = if use_weights {
                let cum = &cumulative[u];
                let r = rng.gen::<f64>() * cum[cum.len() - 1];
                cum.partition_point(|&c| c <= r).min(cum.len() - 1)
            } else {
                rng.gen_range(0..nbs.len())
            };
            next[u] = slot;
            u = nbs[slot].node;
            steps += 1;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            let nb = g.neighbors(u)[next[u]];
            kept.push(nb.edge);
            u = nb.node;
        }
    }
    Ok((kept, steps))
}

pub fn wilson_rst<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
    use_weights: bool,
) -> Result<(WeightedTree, Vec<EdgeId>, u64)> {
    let (ids, steps) = wilson(g, rng, use_weights)?;
    let (tree, ids) = tree_from_edge_ids(g, ids)?;
    Ok((tree, ids, steps))
}

/// Spanning tree maximizing weight magnitudes, i.e. minimizing the total
/// resistance. Equal weights are taken in edge-id order.
pub fn mst(g: &WeightedGraph) -> Result<TreeSample> {
    require_connected(g)?;
    let mut ids: Vec<EdgeId> = (0..g.edge_count()).collect();
    ids.sort_by(|&a, &b| g.edge(b).magnitude().total_cmp(&g.edge(a).magnitude()));
    let mut dsu = DisjointSets::new(g.node_count());
    let kept: Vec<EdgeId> = ids
        .into_iter()
        .filter(|&id| dsu.union(g.edge(id).u, g.edge(id).v))
        .collect();
    let (tree, edge_ids) = tree_from_edge_ids(g, kept)?;
    Ok(TreeSample {
        tree,
        kind: TreeKind::Mst,
        seed: 0,
        edge_ids,
        walk_steps: 0,
    })
}

/// Draws one spanning tree of the requested kind.
pub fn sample_tree(g: &WeightedGraph, kind: TreeKind, seed: u64) -> Result<TreeSample> {
    match kind {
        TreeKind::Mst => mst(g).map(|s| TreeSample { seed, ..s }),
        TreeKind::Rst | TreeKind::Nwrst => {
            let mut rng = seeded_rng(seed);
            let (tree, edge_ids, walk_steps) = wilson_rst(g, &mut rng, kind == TreeKind::Rst)?;
            Ok(TreeSample {
                tree,
                kind,
                seed,
                edge_ids,
                walk_steps,
            })
        }
    }
}

/// Nodes in a line with the weights of consecutive pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedLine {
    pub nodes: Vec<NodeId>,
    /// `weights[i]` joins `nodes[i]` and `nodes[i + 1]`; all positive.
    pub weights: Vec<f64>,
}

impl WeightedLine {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Line position of every node id in `0..node_count`.
    pub fn positions(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut pos = vec![None; node_count];
        for (i, &v) in self.nodes.iter().enumerate() {
            pos[v] = Some(i);
        }
        pos
    }

    /// The line as a path-shaped tree over the same node ids.
    pub fn to_tree(&self) -> Result<WeightedTree> {
        let n = self.nodes.iter().max().map_or(0, |m| m + 1);
        WeightedTree::from_triples(
            n,
            self.nodes
                .windows(2)
                .zip(&self.weights)
                .map(|(p, &w)| (p[0], p[1], w)),
            false,
        )
    }
}

/// Depth-first preorder of `t` from `root`, children in ascending id.
///
/// Consecutive nodes that are tree neighbours keep their edge weight;
/// otherwise the line weight is the smallest weight magnitude on the tree
/// path between them.
pub fn dfs_linearize(t: &WeightedTree, root: NodeId) -> Result<WeightedLine> {
    t.graph().check_node(root)?;
    let n = t.node_count();
    let mut parent = vec![NO_NODE; n];
    let mut parent_w = vec![0.0f64; n];
    let mut nodes = Vec::with_capacity(n);
    let mut stack = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        nodes.push(u);
        // Push in reverse so the smallest id is visited first.
        for nb in t.neighbors(u).iter().rev() {
            if !seen[nb.node] {
                seen[nb.node] = true;
                parent[nb.node] = u;
                parent_w[nb.node] = nb.weight.abs();
                stack.push(nb.node);
            }
        }
    }

    let mut weights = Vec::with_capacity(n.saturating_sub(1));
    for pair in nodes.windows(2) {
        let (prev, v) = (pair[0], pair[1]);
        // v hangs off an ancestor of prev (or prev itself); climb to it.
        let target = parent[v];
        let mut w = parent_w[v];
        let mut cur = prev;
        while cur != target {
            w = w.min(parent_w[cur]);
            cur = parent[cur];
        }
        weights.push(w);
    }
    Ok(WeightedLine { nodes, weights })
}

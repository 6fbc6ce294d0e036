//! Forks, hinge nodes, hinge trees and connection nodes.
//!
//! A fork is an unrevealed node with at least three incident branches that
//! each contain a revealed node; in a tree that is the same as having
//! edge-disjoint paths to three distinct revealed nodes. Hinge nodes are
//! the forks plus the revealed nodes. Deleting every edge incident to a
//! hinge node leaves a forest whose components are the hinge trees.

use std::collections::HashSet;

use crate::cut::{subtree_cut, CutMode};
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedTree};
use crate::label::RevealedState;

/// Marks every fork of `t` under the revealed state `s`.
pub fn fork_flags(t: &WeightedTree, s: &RevealedState) -> Vec<bool> {
    let n = t.node_count();
    let total = s.revealed_count();
    let mut flags = vec![false; n];
    if total < 3 {
        return flags;
    }
    let r = t.rooted_at(0);
    let mut below = vec![0usize; n];
    let mut marked_children = vec![0u32; n];
    for &v in r.order.iter().rev() {
        if s.is_revealed(v) {
            below[v] += 1;
        }
        if !r.is_root(v) {
            let p = r.parent[v];
            below[p] += below[v];
            if below[v] > 0 {
                marked_children[p] += 1;
            }
        }
    }
    for v in 0..n {
        if s.is_revealed(v) {
            continue;
        }
        let up = u32::from(!r.is_root(v) && total > below[v]);
        flags[v] = marked_children[v] + up >= 3;
    }
    flags
}

/// All forks of `t`, ascending.
pub fn forks(t: &WeightedTree, s: &RevealedState) -> Vec<NodeId> {
    fork_flags(t, s)
        .into_iter()
        .enumerate()
        .filter_map(|(v, f)| f.then_some(v))
        .collect()
}

/// A connection node of the query's hinge tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionNode {
    pub node: NodeId,
    /// Resistance distance to the query, boundary edge included.
    pub distance: f64,
    /// Negative-weight edges on the path to the query.
    pub negative_edges: usize,
    pub delta: f64,
}

impl ConnectionNode {
    pub fn delta_sign(&self) -> i8 {
        if self.delta > 0.0 {
            1
        } else if self.delta < 0.0 {
            -1
        } else {
            0
        }
    }
}

/// Hinge structure seen from an unrevealed query node.
#[derive(Clone, Debug, PartialEq)]
pub struct HingeView {
    pub query: NodeId,
    /// Forks inside `T^query`; forks elsewhere cannot influence the query.
    pub forks: Vec<NodeId>,
    /// Revealed nodes together with `forks`, ascending.
    pub hinge_nodes: Vec<NodeId>,
    /// Nodes of the hinge tree containing the query, ascending.
    pub hinge_tree: Vec<NodeId>,
    /// Sorted by `(distance, node)`.
    pub connections: Vec<ConnectionNode>,
}

impl HingeView {
    pub fn query_is_fork(&self) -> bool {
        self.forks.binary_search(&self.query).is_ok()
    }
}

/// Hinge data for a query before any Δ is evaluated.
pub(crate) struct Region {
    pub forks: Vec<NodeId>,
    pub hinge_tree: Vec<NodeId>,
    /// `(node, distance, negative edges)`, sorted by `(distance, node)`.
    pub connections: Vec<(NodeId, f64, usize)>,
}

pub(crate) fn locate(t: &WeightedTree, s: &RevealedState, q: NodeId) -> Region {
    // Step 1: visit T^q, counting revealed nodes per subtree.
    let mut visit: Vec<(NodeId, usize)> = vec![(q, usize::MAX)];
    let mut i = 0;
    while i < visit.len() {
        let (u, p) = visit[i];
        if i == 0 || !s.is_revealed(u) {
            let from = if p == usize::MAX {
                usize::MAX
            } else {
                visit[p].0
            };
            for nb in t.neighbors(u) {
                if nb.node != from {
                    visit.push((nb.node, i));
                }
            }
        }
        i += 1;
    }
    let mut below = vec![0usize; visit.len()];
    let mut marked_children = vec![0u32; visit.len()];
    for k in (0..visit.len()).rev() {
        let (u, p) = visit[k];
        if k > 0 && s.is_revealed(u) {
            below[k] += 1;
        }
        if k > 0 {
            below[p] += below[k];
            if below[k] > 0 {
                marked_children[p] += 1;
            }
        }
    }
    let total = below[0];
    let mut forks: Vec<NodeId> = Vec::new();
    for (k, &(u, _)) in visit.iter().enumerate() {
        if k > 0 && s.is_revealed(u) {
            continue;
        }
        let up = u32::from(k > 0 && total > below[k]);
        if marked_children[k] + up >= 3 {
            forks.push(u);
        }
    }
    forks.sort_unstable();

    if forks.binary_search(&q).is_ok() {
        return Region {
            forks,
            hinge_tree: vec![q],
            connections: vec![(q, 0.0, 0)],
        };
    }

    // Step 2: grow H(q) across non-hinge nodes; hinge neighbours are its
    // connection nodes.
    let fork_set: HashSet<NodeId> = forks.iter().copied().collect();
    let is_hinge = |v: NodeId| s.is_revealed(v) || fork_set.contains(&v);
    // (node, parent position, weight to parent)
    let mut tree: Vec<(NodeId, usize, f64)> = vec![(q, usize::MAX, 0.0)];
    let mut connections = Vec::new();
    let mut i = 0;
    while i < tree.len() {
        let (u, p, _) = tree[i];
        let from = if p == usize::MAX {
            usize::MAX
        } else {
            tree[p].0
        };
        for nb in t.neighbors(u) {
            if nb.node == from {
                continue;
            }
            if is_hinge(nb.node) {
                // Sum resistances from the connection node toward q.
                let mut dist = 1.0 / nb.weight.abs();
                let mut neg = usize::from(nb.weight < 0.0);
                let mut k = i;
                while k != 0 {
                    let (_, pk, wk) = tree[k];
                    dist += 1.0 / wk.abs();
                    neg += usize::from(wk < 0.0);
                    k = pk;
                }
                connections.push((nb.node, dist, neg));
            } else {
                tree.push((nb.node, i, nb.weight));
            }
        }
        i += 1;
    }
    connections.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut hinge_tree: Vec<NodeId> = tree.into_iter().map(|(v, _, _)| v).collect();
    hinge_tree.sort_unstable();
    Region {
        forks,
        hinge_tree,
        connections,
    }
}

/// Δ of a hinge node: its label if revealed, otherwise the cut difference.
pub(crate) fn hinge_delta(t: &WeightedTree, s: &RevealedState, v: NodeId, mode: CutMode) -> f64 {
    match s.label(v) {
        Some(y) => y.as_f64(),
        None => subtree_cut(t, s, v, mode).delta(),
    }
}

pub fn hinge_structure(t: &WeightedTree, s: &RevealedState, q: NodeId) -> Result<HingeView> {
    hinge_structure_with(t, s, q, CutMode::Plain)
}

pub fn hinge_structure_with(
    t: &WeightedTree,
    s: &RevealedState,
    q: NodeId,
    mode: CutMode,
) -> Result<HingeView> {
    mode.check(t)?;
    t.graph().check_node(q)?;
    if s.is_revealed(q) {
        return Err(Error::RevealedQuery(q));
    }
    let region = locate(t, s, q);
    let connections = region
        .connections
        .iter()
        .map(|&(node, distance, negative_edges)| ConnectionNode {
            node,
            distance,
            negative_edges,
            delta: hinge_delta(t, s, node, mode),
        })
        .collect();
    let mut hinge_nodes: Vec<NodeId> = s.order().to_vec();
    hinge_nodes.extend_from_slice(&region.forks);
    hinge_nodes.sort_unstable();
    Ok(HingeView {
        query: q,
        forks: region.forks,
        hinge_nodes,
        hinge_tree: region.hinge_tree,
        connections,
    })
}

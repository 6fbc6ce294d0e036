//! Weighted graphs, weighted trees and the tree resistance metric.

use std::collections::{HashSet, VecDeque};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

pub(crate) const NO_NODE: NodeId = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, weight: f64) -> Self {
        Self { u, v, weight }
    }

    /// Absolute weight; equals `weight` outside signed mode.
    #[inline]
    pub fn magnitude(&self) -> f64 {
        self.weight.abs()
    }

    #[inline]
    pub fn resistance(&self) -> f64 {
        1.0 / self.weight.abs()
    }

    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub node: NodeId,
    pub weight: f64,
    pub edge: EdgeId,
}

/// Undirected graph with real edge weights and compressed adjacency.
///
/// Outside signed mode every weight is strictly positive; in signed mode
/// weights are nonzero and their sign encodes similarity or dissimilarity.
/// Adjacency lists are sorted by neighbor id.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    signed: bool,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>, signed: bool) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            if !weight_is_valid(e.weight, signed) {
                return Err(Error::InvalidWeight {
                    u: e.u,
                    v: e.v,
                    weight: e.weight,
                });
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::ParallelEdge(e.u, e.v));
            }
        }

        let mut degree = vec![0usize; n + 1];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for d in &degree[..n] {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);

        let placeholder = Neighbor {
            node: NO_NODE,
            weight: 0.0,
            edge: 0,
        };
        let mut adjacency = vec![placeholder; acc];
        let mut fill = offsets.clone();
        for (id, e) in edges.iter().enumerate() {
            adjacency[fill[e.u]] = Neighbor {
                node: e.v,
                weight: e.weight,
                edge: id,
            };
            fill[e.u] += 1;
            adjacency[fill[e.v]] = Neighbor {
                node: e.u,
                weight: e.weight,
                edge: id,
            };
            fill[e.v] += 1;
        }
        for u in 0..n {
            adjacency[offsets[u]..offsets[u + 1]].sort_unstable_by_key(|nb| nb.node);
        }

        Ok(Self {
            n,
            edges,
            signed,
            offsets,
            adjacency,
        })
    }

    pub fn from_triples(
        n: usize,
        triples: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
        signed: bool,
    ) -> Result<Self> {
        let edges = triples
            .into_iter()
            .map(|(u, v, w)| Edge::new(u, v, w))
            .collect();
        Self::new(n, edges, signed)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[Neighbor] {
        &self.adjacency[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let nbs = self.neighbors(u);
        nbs.binary_search_by_key(&v, |nb| nb.node)
            .ok()
            .map(|i| nbs[i].edge)
    }

    pub fn has_negative_edges(&self) -> bool {
        self.edges.iter().any(|e| e.weight < 0.0)
    }

    /// Component index for every node, numbered in order of smallest member.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for nb in self.neighbors(u) {
                    if comp[nb.node] == usize::MAX {
                        comp[nb.node] = count;
                        queue.push_back(nb.node);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().0 == 1
    }

    pub(crate) fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, n: self.n })
        }
    }
}

fn weight_is_valid(w: f64, signed: bool) -> bool {
    w.is_finite() && if signed { w != 0.0 } else { w > 0.0 }
}

/// A connected, acyclic [`WeightedGraph`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    graph: WeightedGraph,
}

/// Parent pointers and breadth-first order of a tree rooted at some node.
#[derive(Clone, Debug)]
pub struct Rooting {
    pub root: NodeId,
    /// `NO_NODE` at the root.
    pub parent: Vec<NodeId>,
    /// Weight of the edge to the parent; 0 at the root.
    pub parent_weight: Vec<f64>,
    /// Nodes in breadth-first order starting with the root.
    pub order: Vec<NodeId>,
}

impl Rooting {
    pub fn is_root(&self, v: NodeId) -> bool {
        v == self.root
    }
}

/// Breadth-first layout from node 0, indexed by position. The children of
/// position `i` are exactly the positions `child_start[i]..child_start[i + 1]`,
/// so whole-tree passes become sequential sweeps.
pub(crate) struct Layout {
    pub order: Vec<NodeId>,
    /// Parent position; `NO_NODE` at position 0.
    pub parent: Vec<usize>,
    /// Weight of the edge to the parent.
    pub weight: Vec<f64>,
    pub child_start: Vec<usize>,
}

impl Layout {
    #[inline]
    pub fn children(&self, i: usize) -> std::ops::Range<usize> {
        self.child_start[i]..self.child_start[i + 1]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// Values indexed by node id, rearranged by position.
    pub fn gather<T: Copy>(&self, by_node: impl Fn(NodeId) -> T) -> Vec<T> {
        self.order.iter().map(|&v| by_node(v)).collect()
    }
}

impl WeightedTree {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        let n = graph.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut dsu = DisjointSets::new(n);
        for e in graph.edges() {
            if !dsu.union(e.u, e.v) {
                return Err(Error::CycleDetected);
            }
        }
        if dsu.set_count() != 1 {
            return Err(Error::Disconnected);
        }
        Ok(Self { graph })
    }

    pub fn from_triples(
        n: usize,
        triples: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
        signed: bool,
    ) -> Result<Self> {
        Self::new(WeightedGraph::from_triples(n, triples, signed)?)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.graph
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    #[inline]
    pub fn is_signed(&self) -> bool {
        self.graph.is_signed()
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[Neighbor] {
        self.graph.neighbors(u)
    }

    pub fn rooted_at(&self, root: NodeId) -> Rooting {
        let n = self.node_count();
        let mut parent = vec![NO_NODE; n];
        let mut parent_weight = vec![0.0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[root] = true;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for nb in self.neighbors(u) {
                if !seen[nb.node] {
                    seen[nb.node] = true;
                    parent[nb.node] = u;
                    parent_weight[nb.node] = nb.weight;
                    order.push(nb.node);
                }
            }
        }
        Rooting {
            root,
            parent,
            parent_weight,
            order,
        }
    }

    pub(crate) fn layout(&self) -> Layout {
        let n = self.node_count();
        let mut order = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        let mut child_start = Vec::with_capacity(n + 1);
        let mut from = vec![NO_NODE; n];
        order.push(0);
        parent.push(NO_NODE);
        weight.push(0.0);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            child_start.push(order.len());
            for nb in self.neighbors(u) {
                if nb.node != from[u] {
                    from[nb.node] = u;
                    order.push(nb.node);
                    parent.push(head);
                    weight.push(nb.weight);
                }
            }
            head += 1;
        }
        child_start.push(order.len());
        Layout {
            order,
            parent,
            weight,
            child_start,
        }
    }

    /// The unique path from `i` to `j`, both included.
    pub fn tree_path(&self, i: NodeId, j: NodeId) -> Result<Vec<NodeId>> {
        self.graph.check_node(i)?;
        self.graph.check_node(j)?;
        Ok(self.path_with_weights(i, j).0)
    }

    /// Path from `i` to `j` plus the weights of its consecutive edges.
    pub(crate) fn path_with_weights(&self, i: NodeId, j: NodeId) -> (Vec<NodeId>, Vec<f64>) {
        if i == j {
            return (vec![i], Vec::new());
        }
        // Search from j so that following parents from i walks toward j.
        let n = self.node_count();
        let mut parent = vec![NO_NODE; n];
        let mut via = vec![0.0; n];
        parent[j] = j;
        let mut queue = VecDeque::from([j]);
        'search: while let Some(u) = queue.pop_front() {
            for nb in self.neighbors(u) {
                if parent[nb.node] == NO_NODE {
                    parent[nb.node] = u;
                    via[nb.node] = nb.weight;
                    if nb.node == i {
                        break 'search;
                    }
                    queue.push_back(nb.node);
                }
            }
        }
        let mut nodes = vec![i];
        let mut weights = Vec::new();
        let mut cur = i;
        while cur != j {
            weights.push(via[cur]);
            cur = parent[cur];
            nodes.push(cur);
        }
        (nodes, weights)
    }

    /// Sum of `1/|W|` over the edges of the path between `i` and `j`.
    pub fn resistance_distance(&self, i: NodeId, j: NodeId) -> Result<f64> {
        self.graph.check_node(i)?;
        self.graph.check_node(j)?;
        let (_, weights) = self.path_with_weights(i, j);
        Ok(weights.iter().map(|w| 1.0 / w.abs()).sum())
    }

    /// Resistance distance from `root` to every node.
    pub fn distances_from(&self, root: NodeId) -> Vec<f64> {
        let r = self.rooted_at(root);
        let mut dist = vec![0.0; self.node_count()];
        for &v in &r.order[1..] {
            dist[v] = dist[r.parent[v]] + 1.0 / r.parent_weight[v].abs();
        }
        dist
    }

    /// Largest resistance distance between any two nodes (double sweep).
    pub fn resistance_diameter(&self) -> f64 {
        let far = |d: &[f64]| {
            d.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &x)| {
                    if x > best.1 {
                        (i, x)
                    } else {
                        best
                    }
                })
        };
        let (a, _) = far(&self.distances_from(0));
        far(&self.distances_from(a)).1
    }
}

impl TryFrom<WeightedGraph> for WeightedTree {
    type Error = Error;

    fn try_from(g: WeightedGraph) -> Result<Self> {
        WeightedTree::new(g)
    }
}

/// Validates `g` as a tree.
pub fn as_tree(g: WeightedGraph) -> Result<WeightedTree> {
    WeightedTree::new(g)
}

//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use shazoo::{Label, NodeId, RevealedState, WeightedTree};

/// Weights whose sums, reciprocals and differences are exact in f64.
pub const POW2: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Uniform labeled tree on `n` nodes from a random Prüfer sequence.
pub fn prufer_edges<R: Rng>(n: usize, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    match n {
        0 | 1 => return vec![],
        2 => return vec![(0, 1)],
        _ => {}
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Random tree with power-of-two weights; each weight is negated with
/// probability `neg` (signed trees only).
pub fn random_tree<R: Rng>(n: usize, signed: bool, neg: f64, rng: &mut R) -> WeightedTree {
    let edges: Vec<(NodeId, NodeId, f64)> = prufer_edges(n, rng)
        .into_iter()
        .map(|(u, v)| {
            let w = *POW2.choose(rng).unwrap();
            let w = if signed && rng.gen_bool(neg) { -w } else { w };
            (u, v, w)
        })
        .collect();
    WeightedTree::from_triples(n, edges, signed).unwrap()
}

pub fn adjacency(t: &WeightedTree) -> Vec<Vec<(NodeId, f64)>> {
    let mut adj = vec![Vec::new(); t.node_count()];
    for e in t.edges() {
        adj[e.u].push((e.v, e.weight));
        adj[e.v].push((e.u, e.weight));
    }
    adj
}

pub fn edge_cost(signed: bool, w: f64, a: Label, b: Label) -> f64 {
    let bad = if signed {
        (a == b) != (w > 0.0)
    } else {
        a != b
    };
    if bad {
        w.abs()
    } else {
        0.0
    }
}

fn idx(y: Label) -> usize {
    match y {
        Label::Neg => 0,
        Label::Pos => 1,
    }
}

/// Exhaustive minimum cuts for every unrevealed node and label.
pub struct BruteCuts {
    /// Cut restricted to the edges touching the node's unrevealed component.
    pub local: Vec<[f64; 2]>,
    /// Cut over the whole tree.
    pub global: Vec<[f64; 2]>,
}

impl BruteCuts {
    pub fn local(&self, v: NodeId, y: Label) -> f64 {
        self.local[v][idx(y)]
    }

    pub fn global_delta(&self, v: NodeId) -> f64 {
        self.global[v][0] - self.global[v][1]
    }
}

pub fn brute_cuts(t: &WeightedTree, s: &RevealedState, signed: bool) -> BruteCuts {
    let n = t.node_count();
    let adj = adjacency(t);
    let free: Vec<NodeId> = (0..n).filter(|&v| !s.is_revealed(v)).collect();
    let mut comp = vec![usize::MAX; n];
    let mut comps = 0;
    for &v in &free {
        if comp[v] != usize::MAX {
            continue;
        }
        let mut stack = vec![v];
        comp[v] = comps;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !s.is_revealed(y) && comp[y] == usize::MAX {
                    comp[y] = comps;
                    stack.push(y);
                }
            }
        }
        comps += 1;
    }
    let mut local = vec![[f64::INFINITY; 2]; n];
    let mut global = vec![[f64::INFINITY; 2]; n];
    let mut y: Vec<Label> = (0..n).map(|v| s.label(v).unwrap_or(Label::Neg)).collect();
    let mut comp_cost = vec![0.0; comps];
    for mask in 0u32..(1 << free.len()) {
        for (i, &v) in free.iter().enumerate() {
            y[v] = if mask >> i & 1 == 1 {
                Label::Pos
            } else {
                Label::Neg
            };
        }
        comp_cost.iter_mut().for_each(|c| *c = 0.0);
        let mut total = 0.0;
        for e in t.edges() {
            let c = edge_cost(signed, e.weight, y[e.u], y[e.v]);
            total += c;
            let owner = if !s.is_revealed(e.u) {
                Some(comp[e.u])
            } else if !s.is_revealed(e.v) {
                Some(comp[e.v])
            } else {
                None
            };
            if let Some(o) = owner {
                comp_cost[o] += c;
            }
        }
        for &v in &free {
            let k = idx(y[v]);
            local[v][k] = local[v][k].min(comp_cost[comp[v]]);
            global[v][k] = global[v][k].min(total);
        }
    }
    BruteCuts { local, global }
}

/// Every partial labeling of `n` nodes: each node unrevealed, -1 or +1.
pub fn all_states(n: usize) -> impl Iterator<Item = RevealedState> {
    (0..3usize.pow(n as u32)).map(move |mut code| {
        let mut pairs = Vec::new();
        for v in 0..n {
            match code % 3 {
                1 => pairs.push((v, Label::Neg)),
                2 => pairs.push((v, Label::Pos)),
                _ => {}
            }
            code /= 3;
        }
        RevealedState::from_pairs(n, pairs).unwrap()
    })
}

/// Path from `a` to `b` as (node, weight of the edge entering it).
fn path(adj: &[Vec<(NodeId, f64)>], a: NodeId, b: NodeId) -> Vec<(NodeId, f64)> {
    let n = adj.len();
    let mut parent = vec![(usize::MAX, 0.0); n];
    let mut seen = vec![false; n];
    let mut stack = vec![a];
    seen[a] = true;
    while let Some(x) = stack.pop() {
        for &(y, w) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = (x, w);
                stack.push(y);
            }
        }
    }
    let mut out = Vec::new();
    let mut x = b;
    while x != a {
        out.push((x, parent[x].1));
        x = parent[x].0;
    }
    out
}

pub fn resistance(adj: &[Vec<(NodeId, f64)>], a: NodeId, b: NodeId) -> f64 {
    path(adj, a, b).iter().map(|&(_, w)| 1.0 / w.abs()).sum()
}

fn negative_edges(adj: &[Vec<(NodeId, f64)>], a: NodeId, b: NodeId) -> usize {
    path(adj, a, b).iter().filter(|&&(_, w)| w < 0.0).count()
}

fn branch_has_revealed(
    adj: &[Vec<(NodeId, f64)>],
    s: &RevealedState,
    from: NodeId,
    start: NodeId,
) -> bool {
    let mut stack = vec![(start, from)];
    while let Some((x, p)) = stack.pop() {
        if s.is_revealed(x) {
            return true;
        }
        for &(y, _) in &adj[x] {
            if y != p {
                stack.push((y, x));
            }
        }
    }
    false
}

pub fn is_fork(adj: &[Vec<(NodeId, f64)>], s: &RevealedState, v: NodeId) -> bool {
    !s.is_revealed(v)
        && adj[v]
            .iter()
            .filter(|&&(y, _)| branch_has_revealed(adj, s, v, y))
            .count()
            >= 3
}

/// The prediction rule evaluated straight from its definitions: forks by
/// branch counting, hinge tree by edge deletion, Δ from exhaustive cuts and
/// distances from explicit paths.
pub fn oracle_predict(
    t: &WeightedTree,
    s: &RevealedState,
    brute: &BruteCuts,
    q: NodeId,
    signed: bool,
) -> Label {
    let adj = adjacency(t);
    let n = t.node_count();
    let hinge: Vec<bool> = (0..n)
        .map(|v| s.is_revealed(v) || is_fork(&adj, s, v))
        .collect();
    let delta = |v: NodeId| match s.label(v) {
        Some(l) => l.as_f64(),
        None => brute.global_delta(v),
    };
    let sign = |x: f64| if x > 0.0 { Label::Pos } else { Label::Neg };
    if hinge[q] {
        let d = delta(q);
        return if d == 0.0 { Label::Neg } else { sign(d) };
    }
    let mut in_h = vec![false; n];
    in_h[q] = true;
    let mut stack = vec![q];
    let mut conn = Vec::new();
    while let Some(x) = stack.pop() {
        for &(y, _) in &adj[x] {
            if hinge[y] {
                if !conn.contains(&y) {
                    conn.push(y);
                }
            } else if !in_h[y] {
                in_h[y] = true;
                stack.push(y);
            }
        }
    }
    let mut ranked: Vec<(f64, NodeId)> =
        conn.iter().map(|&c| (resistance(&adj, q, c), c)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, c) in ranked {
        let d = delta(c);
        if d != 0.0 {
            let flip = signed && negative_edges(&adj, q, c) % 2 == 1;
            let l = sign(d);
            return if flip { l.flipped() } else { l };
        }
    }
    Label::Neg
}

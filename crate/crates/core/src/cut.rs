//! Exact minimum weighted cuts on trees consistent with revealed labels.
//!
//! For an unrevealed node `v`, `T^v` is the maximal subtree around `v`
//! whose internal nodes are all unrevealed; revealed nodes bordering it are
//! its leaves. The minimum cut of `T^v` with `y_v` fixed is obtained by a
//! bottom-up recursion over `T^v` rooted at `v`:
//!
//! ```text
//! phi_i(y) = sum over children j of  min_{y' in Y_j} ( phi_j(y') + cost(w_ij, y, y') )
//! ```
//!
//! where `Y_j = {y_j}` for revealed `j` and `{-1, +1}` otherwise, and leaves
//! have `phi = 0`. [`batch_cut_all`] obtains the value at every unrevealed
//! node in linear total time by rerooting each `T^v` once.

use crate::error::{Error, Result};
use crate::graph::{Layout, NodeId, WeightedTree, NO_NODE};
use crate::label::{Label, RevealedState};

/// Which edges count toward a cut.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CutMode {
    /// Edges whose endpoints disagree.
    #[default]
    Plain,
    /// Frustrated edges: `y_i * y_j != sgn(w_ij)`.
    Signed,
}

impl CutMode {
    /// Cut contribution of an edge of weight `w` whose endpoints carry `a` and `b`.
    #[inline]
    pub fn edge_cost(self, w: f64, a: Label, b: Label) -> f64 {
        let counted = match self {
            CutMode::Plain => a != b,
            CutMode::Signed => (a == b) != (w > 0.0),
        };
        if counted {
            w.abs()
        } else {
            0.0
        }
    }

    pub fn for_tree(t: &WeightedTree) -> Self {
        if t.is_signed() {
            CutMode::Signed
        } else {
            CutMode::Plain
        }
    }

    pub(crate) fn check(self, t: &WeightedTree) -> Result<()> {
        if self == CutMode::Signed && !t.is_signed() {
            Err(Error::SignedModeRequired)
        } else {
            Ok(())
        }
    }
}

/// Minimum cut values with the node's own label fixed to -1 and +1.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutPair {
    pub neg: f64,
    pub pos: f64,
}

impl CutPair {
    pub const ZERO: CutPair = CutPair { neg: 0.0, pos: 0.0 };

    #[inline]
    pub fn get(&self, y: Label) -> f64 {
        match y {
            Label::Neg => self.neg,
            Label::Pos => self.pos,
        }
    }

    #[inline]
    fn add(&mut self, other: CutPair) {
        self.neg += other.neg;
        self.pos += other.pos;
    }

    /// `cut(-1) - cut(+1)`; positive values favour +1.
    #[inline]
    pub fn delta(&self) -> f64 {
        self.neg - self.pos
    }
}

/// Contribution of an edge to its parent endpoint, for both parent labels.
///
/// `child` is the child's label if revealed, otherwise its own cut pair is
/// minimized over.
#[inline]
fn edge_term(mode: CutMode, w: f64, child: Option<Label>, child_phi: CutPair) -> CutPair {
    let term = |y: Label| match child {
        Some(yc) => mode.edge_cost(w, y, yc),
        None => {
            let a = child_phi.neg + mode.edge_cost(w, y, Label::Neg);
            let b = child_phi.pos + mode.edge_cost(w, y, Label::Pos);
            a.min(b)
        }
    };
    CutPair {
        neg: term(Label::Neg),
        pos: term(Label::Pos),
    }
}

/// Cut pair at `v` by a single depth-first evaluation of `T^v`.
pub fn cut_pair(t: &WeightedTree, s: &RevealedState, v: NodeId, mode: CutMode) -> Result<CutPair> {
    mode.check(t)?;
    t.graph().check_node(v)?;
    if s.is_revealed(v) {
        return Err(Error::RevealedQuery(v));
    }
    Ok(subtree_cut(t, s, v, mode))
}

pub(crate) fn subtree_cut(
    t: &WeightedTree,
    s: &RevealedState,
    v: NodeId,
    mode: CutMode,
) -> CutPair {
    // (node, parent position, edge weight to parent), parents before children.
    let mut visit: Vec<(NodeId, usize, f64)> = vec![(v, usize::MAX, 0.0)];
    let mut i = 0;
    while i < visit.len() {
        let (u, p, _) = visit[i];
        if i == 0 || !s.is_revealed(u) {
            let from = if p == usize::MAX { NO_NODE } else { visit[p].0 };
            for nb in t.neighbors(u) {
                if nb.node != from {
                    visit.push((nb.node, i, nb.weight));
                }
            }
        }
        i += 1;
    }
    let mut phi = vec![CutPair::ZERO; visit.len()];
    for k in (1..visit.len()).rev() {
        let (u, p, w) = visit[k];
        let term = edge_term(mode, w, s.label(u), phi[k]);
        phi[p].add(term);
    }
    phi[0]
}

/// Minimum weighted cutsize of `T^v` consistent with `s` and `y_v = y`.
pub fn cut_value(t: &WeightedTree, s: &RevealedState, v: NodeId, y: Label) -> Result<f64> {
    cut_pair(t, s, v, CutMode::Plain).map(|c| c.get(y))
}

/// Minimum total weight of frustrated edges of `T^v` consistent with `s` and `y_v = y`.
pub fn fcut_value(t: &WeightedTree, s: &RevealedState, v: NodeId, y: Label) -> Result<f64> {
    if !t.is_signed() {
        return Err(Error::SignedModeRequired);
    }
    cut_pair(t, s, v, CutMode::Signed).map(|c| c.get(y))
}

/// `cut(v,-1) - cut(v,+1)` for unrevealed `v`, the label value otherwise.
pub fn delta_with(t: &WeightedTree, s: &RevealedState, v: NodeId, mode: CutMode) -> Result<f64> {
    mode.check(t)?;
    t.graph().check_node(v)?;
    Ok(match s.label(v) {
        Some(y) => y.as_f64(),
        None => subtree_cut(t, s, v, mode).delta(),
    })
}

pub fn delta(t: &WeightedTree, s: &RevealedState, v: NodeId) -> Result<f64> {
    delta_with(t, s, v, CutMode::Plain)
}

pub fn signed_delta(t: &WeightedTree, s: &RevealedState, v: NodeId) -> Result<f64> {
    delta_with(t, s, v, CutMode::Signed)
}

/// Cut pairs of every unrevealed node for one revealed-state snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct CutTable {
    entries: Vec<Option<CutPair>>,
    mode: CutMode,
    revealed: usize,
    fingerprint: u64,
}

impl CutTable {
    /// `None` for revealed nodes.
    pub fn get(&self, v: NodeId) -> Option<CutPair> {
        self.entries[v]
    }

    pub fn delta(&self, v: NodeId) -> Option<f64> {
        self.entries[v].map(|c| c.delta())
    }

    pub fn mode(&self) -> CutMode {
        self.mode
    }

    pub fn is_valid_for(&self, s: &RevealedState) -> bool {
        self.entries.len() == s.node_count()
            && self.revealed == s.revealed_count()
            && self.fingerprint == s.fingerprint()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, CutPair)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(v, e)| e.map(|c| (v, c)))
    }
}

pub fn batch_cut_all(t: &WeightedTree, s: &RevealedState) -> CutTable {
    compute_table(t, s, CutMode::Plain)
}

pub fn batch_cut_all_with(t: &WeightedTree, s: &RevealedState, mode: CutMode) -> Result<CutTable> {
    mode.check(t)?;
    Ok(compute_table(t, s, mode))
}

pub(crate) fn compute_table(t: &WeightedTree, s: &RevealedState, mode: CutMode) -> CutTable {
    let layout = t.layout();
    let labels = layout.gather(|v| s.label(v));
    let full = full_cuts(&layout, &labels, mode);
    let mut entries: Vec<Option<CutPair>> = vec![None; t.node_count()];
    for (i, &v) in layout.order.iter().enumerate() {
        if labels[i].is_none() {
            entries[v] = Some(full[i]);
        }
    }
    CutTable {
        entries,
        mode,
        revealed: s.revealed_count(),
        fingerprint: s.fingerprint(),
    }
}

/// `Φ_v^v` at every unrevealed position of the layout; entries at revealed
/// positions are meaningless.
///
/// One bottom-up pass gives each node the cut of its own subtree, cut off
/// at revealed nodes. A top-down pass then adds the part of `T^v` above
/// the node: a revealed parent contributes its edge alone, an unrevealed
/// parent contributes its full value minus this node's branch.
pub(crate) fn full_cuts(layout: &Layout, labels: &[Option<Label>], mode: CutMode) -> Vec<CutPair> {
    let n = layout.len();
    let mut down = vec![CutPair::ZERO; n];
    for i in (0..n).rev() {
        if labels[i].is_some() {
            continue;
        }
        let mut acc = CutPair::ZERO;
        for c in layout.children(i) {
            acc.add(edge_term(mode, layout.weight[c], labels[c], down[c]));
        }
        down[i] = acc;
    }
    let mut full = down.clone();
    for i in 1..n {
        if labels[i].is_some() {
            continue;
        }
        let p = layout.parent[i];
        let w = layout.weight[i];
        let rest = match labels[p] {
            Some(_) => CutPair::ZERO,
            None => {
                let branch = edge_term(mode, w, None, down[i]);
                CutPair {
                    neg: full[p].neg - branch.neg,
                    pos: full[p].pos - branch.pos,
                }
            }
        };
        full[i].add(edge_term(mode, w, labels[p], rest));
    }
    full
}

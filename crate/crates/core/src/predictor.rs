//! The SHAZOO prediction rule, its online driver and its linear-time batch driver.
//!
//! To predict an unrevealed node `q`, look at the connection nodes of the
//! hinge tree containing `q` and take the sign of Δ at the nearest one (in
//! resistance distance) whose Δ is nonzero. Ties go to the lowest node id
//! and the prediction defaults to -1 when no such node exists. In signed
//! mode Δ is computed from frustrated edges and the sign is flipped once
//! per negative edge on the path to the chosen connection node.

use crate::cut::{full_cuts, CutMode};
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedTree};
use crate::hinge::{hinge_delta, locate};
use crate::label::{Label, RevealedState};

/// A single prediction with the node it was copied from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub label: Label,
    /// Connection node that decided the label; `None` on the default branch.
    pub source: Option<NodeId>,
}

impl Prediction {
    const DEFAULT: Prediction = Prediction {
        label: Label::DEFAULT,
        source: None,
    };

    pub fn is_default(&self) -> bool {
        self.source.is_none()
    }
}

fn flip_by_parity(label: Label, negative_edges: usize) -> Label {
    if negative_edges % 2 == 1 {
        label.flipped()
    } else {
        label
    }
}

pub fn predict_online_with(
    t: &WeightedTree,
    s: &RevealedState,
    q: NodeId,
    mode: CutMode,
) -> Result<Prediction> {
    mode.check(t)?;
    t.graph().check_node(q)?;
    if s.is_revealed(q) {
        return Err(Error::RevealedQuery(q));
    }
    let region = locate(t, s, q);
    // Connections are sorted by (distance, id): the first nonzero Δ wins.
    for &(node, _, negative_edges) in &region.connections {
        if let Some(label) = Label::from_sign(hinge_delta(t, s, node, mode)) {
            return Ok(Prediction {
                label: flip_by_parity(label, negative_edges),
                source: Some(node),
            });
        }
    }
    Ok(Prediction::DEFAULT)
}

pub fn predict_online(t: &WeightedTree, s: &RevealedState, q: NodeId) -> Result<Label> {
    predict_online_with(t, s, q, CutMode::Plain).map(|p| p.label)
}

/// Signed-graph prediction: Δ from frustrated edges, flipped by path parity.
pub fn predict_signed(t: &WeightedTree, s: &RevealedState, q: NodeId) -> Result<Label> {
    predict_online_with(t, s, q, CutMode::Signed).map(|p| p.label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub node: NodeId,
    pub predicted: Label,
    pub truth: Label,
    pub mistake: bool,
    /// The prediction came from the default branch.
    pub defaulted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MistakeTrace {
    pub steps: Vec<Step>,
    pub mistakes: usize,
}

impl MistakeTrace {
    pub fn push(&mut self, node: NodeId, predicted: Label, truth: Label, defaulted: bool) {
        let mistake = predicted != truth;
        self.mistakes += usize::from(mistake);
        self.steps.push(Step {
            node,
            predicted,
            truth,
            mistake,
            defaulted,
        });
    }

    pub fn default_count(&self) -> usize {
        self.steps.iter().filter(|s| s.defaulted).count()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub(crate) fn check_permutation(order: &[NodeId], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::NotAPermutation);
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotAPermutation);
        }
    }
    Ok(())
}

pub(crate) fn check_labeling(truth: &[Label], n: usize) -> Result<()> {
    if truth.len() != n {
        return Err(Error::PartialLabeling {
            expected: n,
            got: truth.len(),
        });
    }
    Ok(())
}

/// Presents `order` one node at a time: predict, then reveal the true label.
pub fn run_online_with(
    t: &WeightedTree,
    truth: &[Label],
    order: &[NodeId],
    mode: CutMode,
) -> Result<MistakeTrace> {
    mode.check(t)?;
    let n = t.node_count();
    check_labeling(truth, n)?;
    check_permutation(order, n)?;
    let mut s = RevealedState::new(n);
    let mut trace = MistakeTrace::default();
    for &v in order {
        let p = predict_online_with(t, &s, v, mode)?;
        trace.push(v, p.label, truth[v], p.is_default());
        s.reveal(v, truth[v])?;
    }
    Ok(trace)
}

pub fn run_online(t: &WeightedTree, truth: &[Label], order: &[NodeId]) -> Result<MistakeTrace> {
    run_online_with(t, truth, order, CutMode::Plain)
}

/// Labels indexed by node; unset for nodes that were not queried.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predictions {
    labels: Vec<Option<Label>>,
}

impl Predictions {
    pub fn new(n: usize) -> Self {
        Self {
            labels: vec![None; n],
        }
    }

    pub fn set(&mut self, v: NodeId, label: Label) {
        self.labels[v] = Some(label);
    }

    pub fn get(&self, v: NodeId) -> Option<Label> {
        self.labels.get(v).copied().flatten()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(node, label)` pairs in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Label)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|l| (v, l)))
    }
}

impl FromIterator<(NodeId, Label)> for Predictions {
    /// Sized by the largest node id seen.
    fn from_iter<I: IntoIterator<Item = (NodeId, Label)>>(iter: I) -> Self {
        let pairs: Vec<_> = iter.into_iter().collect();
        let n = pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0);
        let mut out = Predictions::new(n);
        for (v, l) in pairs {
            out.set(v, l);
        }
        out
    }
}

pub(crate) fn check_test_set(n: usize, train: &RevealedState, test: &[NodeId]) -> Result<()> {
    for &v in test {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        if train.is_revealed(v) {
            return Err(Error::TrainTestOverlap(v));
        }
    }
    Ok(())
}

/// Nearest labelled source found so far: `(distance, source id, parity, label)`.
#[derive(Clone, Copy, Debug)]
struct Nearest {
    dist: f64,
    source: NodeId,
    negative_edges: usize,
    label: Label,
}

impl Nearest {
    fn through(self, w: f64) -> Nearest {
        Nearest {
            dist: self.dist + 1.0 / w.abs(),
            negative_edges: self.negative_edges + usize::from(w < 0.0),
            ..self
        }
    }

    fn better_than(&self, other: &Option<Nearest>) -> bool {
        match other {
            None => true,
            Some(o) => self.dist < o.dist || (self.dist == o.dist && self.source < o.source),
        }
    }
}

fn keep_best(slot: &mut Option<Nearest>, cand: Nearest) {
    if cand.better_than(slot) {
        *slot = Some(cand);
    }
}

/// Predicts every test node with exactly the training labels revealed.
///
/// Runs in time linear in the tree size over a single breadth-first layout:
/// a subtree count marks the forks, a rerooted cut pass gives Δ at every
/// unrevealed node, and a two-pass propagation finds the nearest
/// informative hinge node of every other node.
pub fn predict_batch_with(
    t: &WeightedTree,
    train: &RevealedState,
    test: &[NodeId],
    mode: CutMode,
) -> Result<Predictions> {
    mode.check(t)?;
    let n = t.node_count();
    check_test_set(n, train, test)?;

    let layout = t.layout();
    let labels = layout.gather(|v| train.label(v));
    let total = train.revealed_count();

    let mut below = vec![0usize; n];
    let mut fork = vec![false; n];
    for i in (0..n).rev() {
        let mut marked = 0;
        below[i] = usize::from(labels[i].is_some());
        for c in layout.children(i) {
            below[i] += below[c];
            marked += usize::from(below[c] > 0);
        }
        let up = usize::from(i > 0 && total > below[i]);
        fork[i] = labels[i].is_none() && marked + up >= 3;
    }

    let full = full_cuts(&layout, &labels, mode);
    let source: Vec<Option<Label>> = (0..n)
        .map(|i| match labels[i] {
            Some(y) => Some(y),
            None if fork[i] => Label::from_sign(full[i].delta()),
            None => None,
        })
        .collect();
    let hinge = |i: usize| fork[i] || labels[i].is_some();
    let reach = |best: &[Option<Nearest>], i: usize, w: f64| {
        if hinge(i) {
            source[i].map(|label| {
                Nearest {
                    dist: 0.0,
                    source: layout.order[i],
                    negative_edges: 0,
                    label,
                }
                .through(w)
            })
        } else {
            best[i].map(|b| b.through(w))
        }
    };

    let mut best: Vec<Option<Nearest>> = vec![None; n];
    for i in (0..n).rev() {
        if hinge(i) {
            continue;
        }
        let mut slot = None;
        for c in layout.children(i) {
            if let Some(cand) = reach(&best, c, layout.weight[c]) {
                keep_best(&mut slot, cand);
            }
        }
        best[i] = slot;
    }
    for i in 1..n {
        if hinge(i) {
            continue;
        }
        if let Some(cand) = reach(&best, layout.parent[i], layout.weight[i]) {
            keep_best(&mut best[i], cand);
        }
    }

    let mut by_node: Vec<Option<Label>> = vec![None; n];
    for (i, &v) in layout.order.iter().enumerate() {
        if labels[i].is_some() {
            continue;
        }
        by_node[v] = Some(if fork[i] {
            source[i].unwrap_or(Label::DEFAULT)
        } else {
            match best[i] {
                Some(b) => flip_by_parity(b.label, b.negative_edges),
                None => Label::DEFAULT,
            }
        });
    }
    let mut out = Predictions::new(n);
    for &v in test {
        out.set(v, by_node[v].expect("unrevealed test node"));
    }
    Ok(out)
}

pub fn predict_batch(
    t: &WeightedTree,
    train: &RevealedState,
    test: &[NodeId],
) -> Result<Predictions> {
    predict_batch_with(t, train, test, CutMode::Plain)
}

/// Batch prediction of every unrevealed node.
pub fn predict_all_with(
    t: &WeightedTree,
    train: &RevealedState,
    mode: CutMode,
) -> Result<Predictions> {
    let test: Vec<NodeId> = (0..t.node_count())
        .filter(|&v| !train.is_revealed(v))
        .collect();
    predict_batch_with(t, train, &test, mode)
}

//! Comparison predictors: online majority vote, label propagation,
//! nearest neighbour on a linearized tree, and spanning-tree committees.

use rayon::prelude::*;

use crate::cut::CutMode;
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph, WeightedTree};
use crate::label::{Label, RevealedState};
use crate::predictor::{
    check_labeling, check_permutation, check_test_set, predict_batch_with, MistakeTrace,
    Predictions,
};
use crate::spanning::{dfs_linearize, sample_tree, TreeKind, WeightedLine};

fn neighbour_vote(g: &WeightedGraph, s: &RevealedState, v: NodeId) -> f64 {
    g.neighbors(v)
        .iter()
        .filter_map(|nb| s.label(nb.node).map(|y| y.as_f64() * nb.weight))
        .sum()
}

/// Online majority vote: predict the sign of `sum y_s w_{s,t}` over revealed
/// neighbours, -1 when the sum is zero.
pub fn omv_run(g: &WeightedGraph, truth: &[Label], order: &[NodeId]) -> Result<MistakeTrace> {
    let n = g.node_count();
    check_labeling(truth, n)?;
    check_permutation(order, n)?;
    let mut s = RevealedState::new(n);
    let mut trace = MistakeTrace::default();
    for &v in order {
        let vote = Label::from_sign(neighbour_vote(g, &s, v));
        trace.push(v, vote.unwrap_or(Label::DEFAULT), truth[v], vote.is_none());
        s.reveal(v, truth[v])?;
    }
    Ok(trace)
}

/// Majority vote of the training neighbours of each test node.
///
/// This is [`omv_run`] after presenting the training nodes first and
/// withholding test labels.
pub fn omv_batch(g: &WeightedGraph, train: &RevealedState, test: &[NodeId]) -> Result<Predictions> {
    check_test_set(g.node_count(), train, test)?;
    let mut out = Predictions::new(g.node_count());
    for &v in test {
        out.set(v, Label::sign_or_default(neighbour_vote(g, train, v)));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabPropOptions {
    /// Stop once the largest residual `|x_v - avg_nb(x)|` is at most this.
    pub tol: f64,
    /// Gauss-Seidel sweeps; `None` derives a cap from the conditioning,
    /// `n^2 * (w_max / w_min) * ln(1 / tol)`, and never less than
    /// `100 * n * max_degree`.
    pub max_iter: Option<usize>,
}

impl Default for LabPropOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabPropResult {
    /// Harmonic values; training nodes hold their label.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub max_residual: f64,
    pub converged: bool,
}

impl LabPropResult {
    /// Sign of the value, -1 when it is exactly zero.
    pub fn predict(&self, test: &[NodeId]) -> Predictions {
        let mut out = Predictions::new(self.values.len());
        for &v in test {
            out.set(v, Label::sign_or_default(self.values[v]));
        }
        out
    }
}

fn default_sweeps(g: &WeightedGraph, tol: f64) -> usize {
    let n = g.node_count();
    let floor = (100 * n * g.max_degree()).max(1);
    let (lo, hi) = g
        .edges()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| {
            (lo.min(e.weight), hi.max(e.weight))
        });
    if hi == 0.0 {
        return floor;
    }
    let sweeps = (n * n) as f64 * (hi / lo) * (1.0 / tol.max(f64::EPSILON)).ln().max(1.0);
    floor.max(sweeps.min(usize::MAX as f64 / 2.0).ceil() as usize)
}

/// Harmonic label propagation by Gauss-Seidel sweeps.
///
/// Training nodes are clamped to ±1; every other node converges to the
/// weighted average of its neighbours. Nodes with no path to a training
/// node stay at 0.
pub fn labprop(
    g: &WeightedGraph,
    train: &RevealedState,
    opts: LabPropOptions,
) -> Result<LabPropResult> {
    if train.revealed_count() == 0 {
        return Err(Error::NoTrainingLabels);
    }
    if let Some(e) = g.edges().iter().find(|e| e.weight <= 0.0) {
        return Err(Error::InvalidWeight {
            u: e.u,
            v: e.v,
            weight: e.weight,
        });
    }
    let n = g.node_count();
    let max_iter = opts.max_iter.unwrap_or_else(|| default_sweeps(g, opts.tol));
    let mut x: Vec<f64> = (0..n)
        .map(|v| train.label(v).map_or(0.0, Label::as_f64))
        .collect();
    let free: Vec<NodeId> = (0..n)
        .filter(|&v| !train.is_revealed(v) && g.degree(v) > 0)
        .collect();
    let degree_weight: Vec<f64> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|nb| nb.weight).sum())
        .collect();
    let average = |x: &[f64], v: NodeId| {
        g.neighbors(v)
            .iter()
            .map(|nb| nb.weight * x[nb.node])
            .sum::<f64>()
            / degree_weight[v]
    };
    let residual = |x: &[f64]| {
        free.iter()
            .map(|&v| (x[v] - average(x, v)).abs())
            .fold(0.0, f64::max)
    };

    let mut max_residual = residual(&x);
    let mut iterations = 0;
    while max_residual > opts.tol && iterations < max_iter {
        for &v in &free {
            x[v] = average(&x, v);
        }
        iterations += 1;
        max_residual = residual(&x);
    }
    Ok(LabPropResult {
        values: x,
        iterations,
        max_residual,
        converged: max_residual <= opts.tol,
    })
}

/// Nearest revealed node along the line in resistance distance.
///
/// Ties go to the lower line position; with nothing revealed every node
/// gets -1.
pub fn wta_predict(
    line: &WeightedLine,
    train: &RevealedState,
    test: &[NodeId],
) -> Result<Predictions> {
    let n = train.node_count();
    if let Some(&v) = line.nodes.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node: v, n });
    }
    let positions = line.positions(n);
    check_test_set(n, train, test)?;
    let m = line.len();
    // (distance, label) of the nearest revealed node on each side,
    // accumulated outward from that node.
    let mut left: Vec<Option<(f64, Label)>> = vec![None; m];
    let mut right: Vec<Option<(f64, Label)>> = vec![None; m];
    for i in 1..m {
        let r = 1.0 / line.weights[i - 1];
        left[i] = match train.label(line.nodes[i - 1]) {
            Some(y) => Some((r, y)),
            None => left[i - 1].map(|(d, y)| (d + r, y)),
        };
    }
    for i in (0..m.saturating_sub(1)).rev() {
        let r = 1.0 / line.weights[i];
        right[i] = match train.label(line.nodes[i + 1]) {
            Some(y) => Some((r, y)),
            None => right[i + 1].map(|(d, y)| (d + r, y)),
        };
    }

    let mut out = Predictions::new(n);
    for &v in test {
        let i = positions[v].ok_or(Error::NodeOutOfRange { node: v, n: m })?;
        let label = match (left[i], right[i]) {
            (Some((dl, yl)), Some((dr, yr))) => {
                if dl <= dr {
                    yl
                } else {
                    yr
                }
            }
            (Some((_, y)), None) | (None, Some((_, y))) => y,
            (None, None) => Label::DEFAULT,
        };
        out.set(v, label);
    }
    Ok(out)
}

/// Tree-based predictor run on each committee member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeAlgorithm {
    Shazoo,
    Wta,
}

/// Batch prediction with one algorithm on one spanning tree.
pub fn tree_predict(
    tree: &WeightedTree,
    train: &RevealedState,
    test: &[NodeId],
    algo: TreeAlgorithm,
) -> Result<Predictions> {
    match algo {
        TreeAlgorithm::Shazoo => predict_batch_with(tree, train, test, CutMode::for_tree(tree)),
        TreeAlgorithm::Wta => wta_predict(&dfs_linearize(tree, 0)?, train, test),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommitteeConfig {
    pub k: usize,
    pub tree_kind: TreeKind,
    /// Member `i` samples its tree with seed `base_seed + i`.
    pub base_seed: u64,
}

impl CommitteeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k % 2 == 0 {
            return Err(Error::Config(format!(
                "committee size must be odd and positive, got {}",
                self.k
            )));
        }
        Ok(())
    }

    pub fn member_seed(&self, i: usize) -> u64 {
        self.base_seed.wrapping_add(i as u64)
    }
}

/// Majority vote over `k` spanning trees.
pub fn committee_predict(
    g: &WeightedGraph,
    train: &RevealedState,
    test: &[NodeId],
    cfg: &CommitteeConfig,
    algo: TreeAlgorithm,
) -> Result<Predictions> {
    cfg.validate()?;
    check_test_set(g.node_count(), train, test)?;
    let members: Vec<Predictions> = (0..cfg.k)
        .into_par_iter()
        .map(|i| {
            let sample = sample_tree(g, cfg.tree_kind, cfg.member_seed(i))?;
            tree_predict(&sample.tree, train, test, algo)
        })
        .collect::<Result<_>>()?;
    Ok(majority_vote(&members, test))
}

/// Per-node majority; with an odd number of voters there are no ties.
pub fn majority_vote(members: &[Predictions], test: &[NodeId]) -> Predictions {
    let n = members.first().map_or(0, Predictions::node_count);
    let mut out = Predictions::new(n);
    for &v in test {
        let pos = members
            .iter()
            .filter(|p| p.get(v) == Some(Label::Pos))
            .count();
        let label = if 2 * pos > members.len() {
            Label::Pos
        } else {
            Label::Neg
        };
        out.set(v, label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Neg, Pos};

    fn path3(w: [f64; 2]) -> WeightedGraph {
        WeightedGraph::from_triples(3, [(0, 1, w[0]), (1, 2, w[1])], false).unwrap()
    }

    #[test]
    fn omv_first_prediction_is_default() {
        let g = path3([1.0, 1.0]);
        let trace = omv_run(&g, &[Pos, Pos, Pos], &[1, 0, 2]).unwrap();
        assert_eq!(trace.steps[0].predicted, Neg);
        assert!(trace.steps[0].defaulted);
        assert_eq!(trace.steps[1].predicted, Pos);
        assert_eq!(trace.mistakes, 1);
    }

    #[test]
    fn omv_weighted_vote() {
        let g = path3([2.0, 1.0]);
        let train = RevealedState::from_pairs(3, [(0, Pos), (2, Neg)]).unwrap();
        assert_eq!(omv_batch(&g, &train, &[1]).unwrap().get(1), Some(Pos));
        let g = path3([1.0, 1.0]);
        assert_eq!(omv_batch(&g, &train, &[1]).unwrap().get(1), Some(Neg));
    }

    #[test]
    fn labprop_symmetric_path() {
        let g = path3([1.0, 1.0]);
        let train = RevealedState::from_pairs(3, [(0, Pos), (2, Neg)]).unwrap();
        let r = labprop(&g, &train, LabPropOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.values[1], 0.0);
        assert_eq!(r.predict(&[1]).get(1), Some(Neg));
    }

    #[test]
    fn labprop_weighted_path() {
        let g = path3([1.0, 2.0]);
        let train = RevealedState::from_pairs(3, [(0, Pos), (2, Neg)]).unwrap();
        let r = labprop(&g, &train, LabPropOptions::default()).unwrap();
        assert!((r.values[1] + 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.predict(&[1]).get(1), Some(Neg));
    }

    #[test]
    fn labprop_constant_labels() {
        let g = WeightedGraph::from_triples(
            5,
            [
                (0, 1, 1.0),
                (1, 2, 0.3),
                (2, 3, 2.0),
                (3, 4, 1.0),
                (4, 0, 0.7),
            ],
            false,
        )
        .unwrap();
        let train = RevealedState::from_pairs(5, [(0, Pos), (3, Pos)]).unwrap();
        let r = labprop(&g, &train, LabPropOptions::default()).unwrap();
        assert!(r.values.iter().all(|&x| (x - 1.0).abs() < 1e-8));
    }

    #[test]
    fn labprop_needs_training_labels() {
        let g = path3([1.0, 1.0]);
        assert!(matches!(
            labprop(&g, &RevealedState::new(3), LabPropOptions::default()),
            Err(Error::NoTrainingLabels)
        ));
    }

    #[test]
    fn wta_nearest_in_resistance() {
        let line = WeightedLine {
            nodes: vec![0, 1, 2],
            weights: vec![1.0, 2.0],
        };
        let train = RevealedState::from_pairs(3, [(0, Pos), (2, Neg)]).unwrap();
        assert_eq!(wta_predict(&line, &train, &[1]).unwrap().get(1), Some(Neg));
    }

    #[test]
    fn wta_single_revealed_node_spreads() {
        let line = WeightedLine {
            nodes: vec![3, 1, 0, 2],
            weights: vec![1.0, 2.0, 0.5],
        };
        let train = RevealedState::from_pairs(4, [(0, Pos)]).unwrap();
        let p = wta_predict(&line, &train, &[1, 2, 3]).unwrap();
        assert!(p.iter().all(|(_, l)| l == Pos));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn wta_ties_go_left() {
        let line = WeightedLine {
            nodes: vec![2, 1, 0],
            weights: vec![1.0, 1.0],
        };
        let train = RevealedState::from_pairs(3, [(2, Neg), (0, Pos)]).unwrap();
        assert_eq!(wta_predict(&line, &train, &[1]).unwrap().get(1), Some(Neg));
        let train = RevealedState::from_pairs(3, [(2, Pos), (0, Neg)]).unwrap();
        assert_eq!(wta_predict(&line, &train, &[1]).unwrap().get(1), Some(Pos));
    }

    #[test]
    fn wta_empty_train_defaults() {
        let line = WeightedLine {
            nodes: vec![0, 1],
            weights: vec![1.0],
        };
        let p = wta_predict(&line, &RevealedState::new(2), &[0, 1]).unwrap();
        assert!(p.iter().all(|(_, l)| l == Neg));
    }

    #[test]
    fn majority_of_three() {
        let make = |l: Label| {
            let mut p = Predictions::new(1);
            p.set(0, l);
            p
        };
        let votes = [make(Pos), make(Pos), make(Neg)];
        assert_eq!(majority_vote(&votes, &[0]).get(0), Some(Pos));
        let votes = [make(Neg), make(Pos), make(Neg)];
        assert_eq!(majority_vote(&votes, &[0]).get(0), Some(Neg));
    }

    #[test]
    fn committee_rejects_even_k() {
        let cfg = CommitteeConfig {
            k: 2,
            tree_kind: TreeKind::Rst,
            base_seed: 0,
        };
        assert!(cfg.validate().is_err());
    }
}

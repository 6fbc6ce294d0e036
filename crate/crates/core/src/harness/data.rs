//! Dataset preparation: feature matrices, kNN graphs, splits and the
//! one-vs-all reduction.

use std::collections::BTreeSet;
use std::io::BufRead;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId, WeightedGraph};
use crate::label::{Label, RevealedState};

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {dim} features, found {}", r.len()),
                });
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "non-finite feature".into(),
                });
            }
        }
        Ok(FeatureMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Reads one comma-separated row of reals per node. Blank lines and lines
/// starting with `#` are skipped.
pub fn load_features<R: BufRead>(reader: R) -> Result<FeatureMatrix> {
    let mut rows = Vec::new();
    let mut dim = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                let f = f.trim();
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        message: format!("bad feature value {f:?}"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {d} features, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    FeatureMatrix::new(rows)
}

/// Union-symmetrized k-nearest-neighbour graph with Gaussian weights
/// `exp(-d^2 / sigma2_ij)`, where `sigma2_ij` averages the mean squared
/// kNN distances of both endpoints.
///
/// Neighbour ties are broken by lower index. Weights that underflow are
/// clamped to the smallest positive normal float so the edge survives.
pub fn knn_graph(x: &FeatureMatrix, k: usize) -> Result<WeightedGraph> {
    let n = x.len();
    if k == 0 || k >= n {
        return Err(Error::Config(format!("need 0 < k < n, got k={k}, n={n}")));
    }
    let mut pairs = BTreeSet::new();
    let mut sigma2 = vec![0.0; n];
    let mut cand: Vec<(f64, NodeId)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        cand.clear();
        cand.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (x.squared_distance(i, j), j)),
        );
        cand.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near = &cand[..k];
        sigma2[i] = near.iter().map(|c| c.0).sum::<f64>() / k as f64;
        for &(_, j) in near {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let mut edges = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let s = 0.5 * (sigma2[i] + sigma2[j]);
        if !(s > 0.0) {
            return Err(Error::DegenerateSigma(if sigma2[i] > 0.0 { j } else { i }));
        }
        let w = (-x.squared_distance(i, j) / s).exp().max(f64::MIN_POSITIVE);
        edges.push(Edge::new(i, j, w));
    }
    WeightedGraph::new(n, edges, false)
}

/// Disjoint train and test node sets, both sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<NodeId>,
    pub test: Vec<NodeId>,
}

impl Split {
    /// Test set is every node not in `train`.
    pub fn from_train(n: usize, mut train: Vec<NodeId>) -> Result<Self> {
        train.sort_unstable();
        if let Some(w) = train.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateReveal(w[0]));
        }
        if let Some(&v) = train.iter().find(|&&v| v >= n) {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        let mut in_train = vec![false; n];
        for &v in &train {
            in_train[v] = true;
        }
        let test: Vec<NodeId> = (0..n).filter(|&v| !in_train[v]).collect();
        if train.is_empty() {
            return Err(Error::NoTrainingLabels);
        }
        if test.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        Ok(Split { train, test })
    }

    pub fn revealed(&self, n: usize, truth: &[Label]) -> Result<RevealedState> {
        RevealedState::from_pairs(n, self.train.iter().map(|&v| (v, truth[v])))
    }
}

/// Uniform random training set of `round(fraction * n)` nodes.
pub fn make_split<R: Rng + ?Sized>(n: usize, fraction: f64, rng: &mut R) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0,1), got {fraction}"
        )));
    }
    let m = (fraction * n as f64).round() as usize;
    if m == 0 || m >= n {
        return Err(Error::Config(format!(
            "train fraction {fraction} of {n} nodes leaves an empty train or test set"
        )));
    }
    Split::from_train(n, index::sample(rng, n, m).into_vec())
}

/// One binary task of a one-vs-all reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTask {
    pub name: String,
    pub labels: Vec<Label>,
}

impl BinaryTask {
    /// A task is degenerate when its positive class has no training node.
    pub fn is_degenerate(&self, train: &[NodeId]) -> bool {
        !train.iter().any(|&v| self.labels[v] == Label::Pos)
    }
}

/// One task per distinct class, in sorted class order.
pub fn one_vs_all<C: Ord + ToString>(classes: &[C]) -> Result<Vec<BinaryTask>> {
    let distinct: BTreeSet<&C> = classes.iter().collect();
    if distinct.len() < 2 {
        return Err(Error::SingleClass);
    }
    Ok(distinct
        .into_iter()
        .map(|c| BinaryTask {
            name: c.to_string(),
            labels: classes
                .iter()
                .map(|x| if x == c { Label::Pos } else { Label::Neg })
                .collect(),
        })
        .collect())
}

//! Repeated train/test experiments with CSV reporting.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{
    committee_predict, labprop, omv_batch, tree_predict, CommitteeConfig, LabPropOptions,
    TreeAlgorithm,
};
use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId, WeightedGraph};
use crate::label::{Label, RevealedState};
use crate::predictor::{check_test_set, Predictions};
use crate::spanning::{sample_tree, seeded_rng, TreeKind};

use super::data::{make_split, one_vs_all, BinaryTask, Split};
use super::metrics::{score, Metric};
use super::report::{fmt_sig, write_metadata, EXPERIMENT_SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Shazoo,
    Wta,
    Omv,
    LabProp,
    /// Majority vote of `k` trees, written `k*shazoo` or `k*wta`.
    Committee {
        k: usize,
        member: TreeAlgorithm,
    },
}

impl Algorithm {
    pub fn uses_tree(&self) -> bool {
        !matches!(self, Algorithm::Omv | Algorithm::LabProp)
    }
}

fn member_name(a: TreeAlgorithm) -> &'static str {
    match a {
        TreeAlgorithm::Shazoo => "shazoo",
        TreeAlgorithm::Wta => "wta",
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Shazoo => f.write_str("shazoo"),
            Algorithm::Wta => f.write_str("wta"),
            Algorithm::Omv => f.write_str("omv"),
            Algorithm::LabProp => f.write_str("labprop"),
            Algorithm::Committee { k, member } => write!(f, "{k}*{}", member_name(*member)),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        if let Some((k, m)) = s.split_once('*') {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Config(format!("bad committee size in {s:?}")))?;
            let member = match m {
                "shazoo" => TreeAlgorithm::Shazoo,
                "wta" => TreeAlgorithm::Wta,
                _ => return Err(Error::Config(format!("unknown committee member {m:?}"))),
            };
            return Ok(Algorithm::Committee { k, member });
        }
        match s.as_str() {
            "shazoo" => Ok(Algorithm::Shazoo),
            "wta" => Ok(Algorithm::Wta),
            "omv" => Ok(Algorithm::Omv),
            "labprop" => Ok(Algorithm::LabProp),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitSpec {
    /// Fresh uniform split of this fraction for every repetition.
    Fraction(f64),
    /// Same training nodes in every repetition; the rest is test.
    Fixed(Vec<NodeId>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub tree_kind: TreeKind,
    pub split: SplitSpec,
    pub repetitions: usize,
    pub seed: u64,
    pub signed: bool,
    pub metric: Metric,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, tree_kind: TreeKind, train_fraction: f64) -> Self {
        ExperimentConfig {
            algorithm,
            tree_kind,
            split: SplitSpec::Fraction(train_fraction),
            repetitions: 1,
            seed: 0,
            signed: false,
            metric: Metric::ErrorRate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if let Algorithm::Committee { k, .. } = self.algorithm {
            CommitteeConfig {
                k,
                tree_kind: self.tree_kind,
                base_seed: 0,
            }
            .validate()?;
        }
        if let SplitSpec::Fraction(f) = self.split {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!(
                    "train fraction must lie in (0,1), got {f}"
                )));
            }
        }
        if self.signed
            && matches!(
                self.algorithm,
                Algorithm::Wta
                    | Algorithm::LabProp
                    | Algorithm::Committee {
                        member: TreeAlgorithm::Wta,
                        ..
                    }
            )
        {
            return Err(Error::Config(format!(
                "{} does not support signed graphs",
                self.algorithm
            )));
        }
        Ok(())
    }

    fn split_label(&self) -> String {
        match &self.split {
            SplitSpec::Fraction(f) => fmt_sig(*f),
            SplitSpec::Fixed(t) => format!("fixed:{}", t.len()),
        }
    }
}

/// A graph with one or more binary labeling tasks over its nodes.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub graph: WeightedGraph,
    pub tasks: Vec<BinaryTask>,
    /// Extra `key=value` pairs copied into the report header.
    pub notes: Vec<(String, String)>,
}

impl Dataset {
    pub fn binary(graph: WeightedGraph, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != graph.node_count() {
            return Err(Error::PartialLabeling {
                expected: graph.node_count(),
                got: labels.len(),
            });
        }
        Ok(Dataset {
            graph,
            tasks: vec![BinaryTask {
                name: "+1".into(),
                labels,
            }],
            notes: Vec::new(),
        })
    }

    /// One-vs-all tasks; metrics are macro-averaged over them.
    pub fn multiclass<C: Ord + ToString>(graph: WeightedGraph, classes: &[C]) -> Result<Self> {
        if classes.len() != graph.node_count() {
            return Err(Error::PartialLabeling {
                expected: graph.node_count(),
                got: classes.len(),
            });
        }
        Ok(Dataset {
            graph,
            tasks: one_vs_all(classes)?,
            notes: Vec::new(),
        })
    }
}

/// SplitMix64 finalizer applied to `seed + stream * golden`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn split_seed(seed: u64, rep: usize) -> u64 {
    derive_seed(seed, 2 * rep as u64)
}

pub fn tree_seed(seed: u64, rep: usize) -> u64 {
    derive_seed(seed, 2 * rep as u64 + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskRow {
    pub rep: usize,
    pub task: String,
    pub split_seed: u64,
    pub tree_seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub degenerate: bool,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub metadata: Vec<(String, String)>,
    /// Sorted by repetition, then task order.
    pub rows: Vec<TaskRow>,
    /// Macro average over tasks for each repetition.
    pub rep_values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of `rep_values`; 0 for one repetition.
    pub std: f64,
}

pub const EXPERIMENT_CSV_HEADER: &str =
    "kind,rep,task,split_seed,tree_seed,n_train,n_test,degenerate,value";

impl ExperimentReport {
    pub fn standard_error(&self) -> f64 {
        self.std / (self.rep_values.len() as f64).sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write_metadata(&mut out, &self.metadata)?;
        writeln!(out, "{EXPERIMENT_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "task,{},{},{},{},{},{},{},{}",
                r.rep,
                r.task,
                r.split_seed,
                r.tree_seed,
                r.n_train,
                r.n_test,
                r.degenerate,
                fmt_sig(r.value)
            )?;
        }
        for (rep, v) in self.rep_values.iter().enumerate() {
            writeln!(out, "macro,{rep},,,,,,,{}", fmt_sig(*v))?;
        }
        writeln!(out, "mean,,,,,,,,{}", fmt_sig(self.mean))?;
        writeln!(out, "std,,,,,,,,{}", fmt_sig(self.std))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 csv")
    }
}

/// Connected components as standalone graphs.
struct Parts {
    members: Vec<Vec<NodeId>>,
    graphs: Vec<WeightedGraph>,
    part: Vec<usize>,
    local: Vec<NodeId>,
}

impl Parts {
    fn new(g: &WeightedGraph) -> Result<Self> {
        let (count, part) = g.components();
        let mut members = vec![Vec::new(); count];
        let mut local = vec![0; g.node_count()];
        for v in 0..g.node_count() {
            local[v] = members[part[v]].len();
            members[part[v]].push(v);
        }
        let mut edges = vec![Vec::new(); count];
        for e in g.edges() {
            edges[part[e.u]].push(Edge::new(local[e.u], local[e.v], e.weight));
        }
        let graphs = members
            .iter()
            .zip(edges)
            .map(|(m, es)| WeightedGraph::new(m.len(), es, g.is_signed()))
            .collect::<Result<_>>()?;
        Ok(Parts {
            members,
            graphs,
            part,
            local,
        })
    }
}

fn tree_based(
    parts: &Parts,
    train: &RevealedState,
    test: &[NodeId],
    algorithm: Algorithm,
    tree_kind: TreeKind,
    seed: u64,
) -> Result<Predictions> {
    let mut out = Predictions::new(train.node_count());
    let mut local_test = vec![Vec::new(); parts.graphs.len()];
    for &v in test {
        local_test[parts.part[v]].push(parts.local[v]);
    }
    for (p, g) in parts.graphs.iter().enumerate() {
        if local_test[p].is_empty() {
            continue;
        }
        let m = &parts.members[p];
        let local_train = RevealedState::from_pairs(
            m.len(),
            m.iter()
                .enumerate()
                .filter_map(|(i, &v)| train.label(v).map(|y| (i, y))),
        )?;
        let preds = if local_train.revealed_count() == 0 {
            local_test[p].iter().map(|&i| (i, Label::DEFAULT)).collect()
        } else {
            match algorithm {
                Algorithm::Shazoo | Algorithm::Wta => {
                    let algo = if algorithm == Algorithm::Shazoo {
                        TreeAlgorithm::Shazoo
                    } else {
                        TreeAlgorithm::Wta
                    };
                    let sample = sample_tree(g, tree_kind, seed)?;
                    tree_predict(&sample.tree, &local_train, &local_test[p], algo)?
                }
                Algorithm::Committee { k, member } => {
                    let cc = CommitteeConfig {
                        k,
                        tree_kind,
                        base_seed: seed,
                    };
                    committee_predict(g, &local_train, &local_test[p], &cc, member)?
                }
                Algorithm::Omv | Algorithm::LabProp => unreachable!("graph algorithms"),
            }
        };
        for &i in &local_test[p] {
            out.set(m[i], preds.get(i).expect("prediction for every test node"));
        }
    }
    Ok(out)
}

fn predict_with_parts(
    graph: &WeightedGraph,
    parts: &Parts,
    train: &RevealedState,
    test: &[NodeId],
    algorithm: Algorithm,
    tree_kind: TreeKind,
    seed: u64,
) -> Result<Predictions> {
    check_test_set(graph.node_count(), train, test)?;
    match algorithm {
        Algorithm::Omv => omv_batch(graph, train, test),
        Algorithm::LabProp => Ok(labprop(graph, train, LabPropOptions::default())?.predict(test)),
        _ => tree_based(parts, train, test, algorithm, tree_kind, seed),
    }
}

/// Batch prediction on any graph. Tree algorithms reduce each connected
/// component to a spanning tree drawn with `seed` (a tree input is its own
/// spanning tree); components without training nodes get the default label.
pub fn predict_graph(
    graph: &WeightedGraph,
    train: &RevealedState,
    test: &[NodeId],
    algorithm: Algorithm,
    tree_kind: TreeKind,
    seed: u64,
) -> Result<Predictions> {
    let parts = Parts::new(graph)?;
    predict_with_parts(graph, &parts, train, test, algorithm, tree_kind, seed)
}

fn run_repetition(
    data: &Dataset,
    parts: &Parts,
    cfg: &ExperimentConfig,
    rep: usize,
) -> Result<Vec<TaskRow>> {
    let n = data.graph.node_count();
    let ss = split_seed(cfg.seed, rep);
    let ts = tree_seed(cfg.seed, rep);
    let split = match &cfg.split {
        SplitSpec::Fraction(f) => make_split(n, *f, &mut seeded_rng(ss))?,
        SplitSpec::Fixed(train) => Split::from_train(n, train.clone())?,
    };
    let mut in_train = vec![false; n];
    for &v in &split.train {
        in_train[v] = true;
    }
    assert!(
        split.test.iter().all(|&v| !in_train[v]),
        "train node in test set"
    );
    data.tasks
        .iter()
        .map(|task| {
            let train = split.revealed(n, &task.labels)?;
            let pred = predict_with_parts(
                &data.graph,
                parts,
                &train,
                &split.test,
                cfg.algorithm,
                cfg.tree_kind,
                ts,
            )?;
            Ok(TaskRow {
                rep,
                task: task.name.clone(),
                split_seed: ss,
                tree_seed: ts,
                n_train: split.train.len(),
                n_test: split.test.len(),
                degenerate: task.is_degenerate(&split.train),
                value: score(&pred, &task.labels, &split.test, cfg.metric)?,
            })
        })
        .collect()
}

/// Runs every repetition (in parallel) and aggregates the metric.
///
/// Repetition `r` draws its split from `split_seed(seed, r)` and its trees
/// from `tree_seed(seed, r)`; committee member `i` adds `i` to the latter.
/// Tree algorithms on a disconnected graph run per component, and
/// components without training nodes get the default label.
pub fn run_experiment(cfg: &ExperimentConfig, data: &Dataset) -> Result<ExperimentReport> {
    cfg.validate()?;
    if data.graph.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if cfg.signed && !data.graph.is_signed() {
        return Err(Error::SignedModeRequired);
    }
    if !cfg.signed && data.graph.is_signed() {
        return Err(Error::Config(
            "graph was loaded as signed; enable signed mode".into(),
        ));
    }
    let parts = Parts::new(&data.graph)?;
    let per_rep: Vec<Vec<TaskRow>> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(data, &parts, cfg, rep))
        .collect::<Result<_>>()?;

    let rep_values: Vec<f64> = per_rep
        .iter()
        .map(|rows| rows.iter().map(|r| r.value).sum::<f64>() / rows.len() as f64)
        .collect();
    let reps = rep_values.len() as f64;
    let mean = rep_values.iter().sum::<f64>() / reps;
    let std = if rep_values.len() > 1 {
        (rep_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0)).sqrt()
    } else {
        0.0
    };

    let mut metadata: Vec<(String, String)> = vec![
        ("schema".into(), EXPERIMENT_SCHEMA.into()),
        ("algorithm".into(), cfg.algorithm.to_string()),
        ("tree_kind".into(), cfg.tree_kind.to_string()),
        ("train".into(), cfg.split_label()),
        ("repetitions".into(), cfg.repetitions.to_string()),
        ("seed".into(), cfg.seed.to_string()),
        ("signed".into(), cfg.signed.to_string()),
        ("metric".into(), cfg.metric.to_string()),
        ("nodes".into(), data.graph.node_count().to_string()),
        ("components".into(), parts.graphs.len().to_string()),
        ("default_label".into(), Label::DEFAULT.to_string()),
        (
            "seed_rule".into(),
            "split=splitmix(seed,2r) tree=splitmix(seed,2r+1) member=tree+i".into(),
        ),
    ];
    metadata.extend(data.notes.iter().cloned());
    Ok(ExperimentReport {
        metadata,
        rows: per_rep.into_iter().flatten().collect(),
        rep_values,
        mean,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::synth::{synth_planted_graph, PlantedGraphParams};

    fn planted(n: usize, k: usize, seed: u64) -> Dataset {
        let p = synth_planted_graph(&PlantedGraphParams::new(n, k), &mut seeded_rng(seed)).unwrap();
        Dataset::binary(p.graph, p.labeling).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for s in ["shazoo", "wta", "omv", "labprop", "11*shazoo", "3*wta"] {
            assert_eq!(s.parse::<Algorithm>().unwrap().to_string(), s);
        }
        assert!("x*shazoo".parse::<Algorithm>().is_err());
        assert!("foo".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new("4*shazoo".parse().unwrap(), TreeKind::Rst, 0.1);
        assert!(cfg.validate().is_err());
        cfg.algorithm = Algorithm::Shazoo;
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
        cfg.repetitions = 1;
        cfg.split = SplitSpec::Fraction(1.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reproducible_csv() {
        let data = planted(120, 3, 1);
        for algo in ["shazoo", "wta", "omv", "labprop", "3*shazoo"] {
            let mut cfg = ExperimentConfig::new(algo.parse().unwrap(), TreeKind::Rst, 0.2);
            cfg.repetitions = 3;
            cfg.seed = 7;
            let a = run_experiment(&cfg, &data).unwrap().to_csv_string();
            let b = run_experiment(&cfg, &data).unwrap().to_csv_string();
            assert_eq!(a, b);
            assert!(a.starts_with("# schema=shazoo-experiment/1\n"));
        }
    }

    #[test]
    fn macro_average_and_summary() {
        let p = synth_planted_graph(&PlantedGraphParams::new(90, 3), &mut seeded_rng(2)).unwrap();
        let data = Dataset::multiclass(p.graph, &p.cluster).unwrap();
        let mut cfg = ExperimentConfig::new(Algorithm::Shazoo, TreeKind::Mst, 0.1);
        cfg.repetitions = 4;
        let r = run_experiment(&cfg, &data).unwrap();
        assert_eq!(r.rows.len(), 12);
        for (rep, v) in r.rep_values.iter().enumerate() {
            let rows: Vec<_> = r.rows.iter().filter(|t| t.rep == rep).collect();
            let m = rows.iter().map(|t| t.value).sum::<f64>() / 3.0;
            assert_eq!(*v, m);
        }
        let mean = r.rep_values.iter().sum::<f64>() / 4.0;
        assert!((r.mean - mean).abs() < 1e-15);
    }

    #[test]
    fn disconnected_graph_runs_per_component() {
        let g = WeightedGraph::from_triples(
            6,
            [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0)],
            false,
        )
        .unwrap();
        let y = vec![
            Label::Pos,
            Label::Pos,
            Label::Pos,
            Label::Neg,
            Label::Neg,
            Label::Neg,
        ];
        let data = Dataset::binary(g, y).unwrap();
        let mut cfg = ExperimentConfig::new(Algorithm::Shazoo, TreeKind::Mst, 0.5);
        cfg.split = SplitSpec::Fixed(vec![0, 3]);
        let r = run_experiment(&cfg, &data).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!(r.metadata.contains(&("components".into(), "2".into())));
    }

    #[test]
    fn signed_mode_checks() {
        let data = planted(30, 2, 3);
        let mut cfg = ExperimentConfig::new(Algorithm::Shazoo, TreeKind::Mst, 0.2);
        cfg.signed = true;
        assert!(matches!(
            run_experiment(&cfg, &data),
            Err(Error::SignedModeRequired)
        ));
        cfg.algorithm = Algorithm::LabProp;
        assert!(matches!(run_experiment(&cfg, &data), Err(Error::Config(_))));
    }
}

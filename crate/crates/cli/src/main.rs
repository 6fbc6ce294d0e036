use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;

use shazoo::audit::{
    adversarial_instance, bound_gap_report, cutsize_report, write_bound_row, BOUND_CSV_HEADER,
};
use shazoo::harness::{
    knn_graph, load_features, predict_graph, run_experiment, Algorithm, Dataset, ExperimentConfig,
    Metric, SplitSpec,
};
use shazoo::io::{load_classes, load_edge_list, load_labels, write_edge_list, write_labels, IdMap};
use shazoo::spanning::{sample_tree, seeded_rng, TreeKind};
use shazoo::{as_tree, Label, NodeId, RevealedState, WeightedGraph};

#[derive(Parser)]
#[command(
    name = "shazoo",
    version,
    about = "Node-label prediction on weighted trees and graphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Allow negative edge weights and use the signed predictor.
    #[arg(long, global = true)]
    signed: bool,
    /// Field separator of tabular output; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a kNN graph with Gaussian weights from a feature CSV.
    BuildGraph {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Draw a spanning tree of a graph.
    SampleTree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = TreeKind::Rst)]
        kind: TreeKind,
    },
    /// Predict the labels of unlabeled nodes.
    Predict {
        /// Edge list; graphs that are not trees are reduced with --kind.
        #[arg(long)]
        graph: PathBuf,
        /// Training labels, `node<TAB>±1`.
        #[arg(long)]
        train: PathBuf,
        /// Nodes to predict, one per line; defaults to every unlabeled node.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value = "shazoo")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = TreeKind::Mst)]
        kind: TreeKind,
    },
    /// Run a repeated train/test experiment and print a CSV report.
    Run(RunArgs),
    /// Emit an adversarial labeling of a tree for a cutsize budget.
    Adversary {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        budget: f64,
    },
    /// Run the online predictor over a labeled tree and report cutsize
    /// measures next to the mistake count.
    Audit {
        #[arg(long)]
        tree: PathBuf,
        /// Labels for every node.
        #[arg(long)]
        labels: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Edge list input.
    #[arg(
        long,
        conflicts_with = "features",
        required_unless_present = "features"
    )]
    graph: Option<PathBuf>,
    /// Feature CSV input, turned into a kNN graph.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Labels for every node; `node<TAB>±1`, or any class token with --multiclass.
    #[arg(long)]
    labels: PathBuf,
    /// Treat labels as class ids and macro-average one-vs-all tasks.
    #[arg(long)]
    multiclass: bool,
    #[arg(long, default_value = "shazoo")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = TreeKind::Rst)]
    kind: TreeKind,
    #[arg(long, default_value_t = 0.1, conflicts_with = "train_file")]
    train_fraction: f64,
    /// Fixed training nodes, one per line.
    #[arg(long)]
    train_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long, default_value_t = Metric::ErrorRate)]
    metric: Metric,
}

/// Exit status 2 marks configuration errors, 1 bad data.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e
                .chain()
                .filter_map(|c| c.downcast_ref::<shazoo::Error>())
                .any(shazoo::Error::is_config)
                || e.downcast_ref::<ConfigError>().is_some();
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_graph(path: &Path, signed: bool) -> Result<(WeightedGraph, IdMap)> {
    let g = load_edge_list(open(path)?, signed)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok((g.graph, g.ids))
}

fn read_nodes(path: &Path, ids: &IdMap) -> Result<Vec<NodeId>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|name| {
            ids.get(name)
                .with_context(|| format!("{}: unknown node {name:?}", path.display()))
        })
        .collect()
}

fn full_labeling(pairs: Vec<(NodeId, Label)>, n: usize) -> Result<Vec<Label>> {
    if pairs.len() != n {
        return Err(shazoo::Error::PartialLabeling {
            expected: n,
            got: pairs.len(),
        }
        .into());
    }
    let mut y = vec![Label::DEFAULT; n];
    for (v, l) in pairs {
        y[v] = l;
    }
    Ok(y)
}

/// Writes `text` to --out or stdout, converting separators for --format.
fn emit(global: &Global, text: String, native: Format) -> Result<()> {
    let text = match (native, global.format.unwrap_or(native)) {
        (Format::Tsv, Format::Csv) => text.replace('\t', ","),
        (Format::Csv, Format::Tsv) => {
            text.lines()
                .map(|l| {
                    if l.starts_with('#') {
                        l.to_string()
                    } else {
                        l.replace(',', "\t")
                    }
                })
                .collect::<Vec<_>>()
                .join("\n")
                + "\n"
        }
        _ => text,
    };
    match &global.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let mut buf: Vec<u8> = Vec::new();
    let native = match &cli.command {
        Command::BuildGraph { features, k } => {
            let x = load_features(open(features)?)
                .with_context(|| format!("reading {}", features.display()))?;
            let graph = knn_graph(&x, *k)?;
            let (components, _) = graph.components();
            writeln!(
                buf,
                "# knn k={k} symmetrization=union nodes={} edges={} components={components}",
                graph.node_count(),
                graph.edge_count()
            )?;
            write_edge_list(&graph, None, &mut buf)?;
            Format::Tsv
        }
        Command::SampleTree { graph, kind } => {
            let (graph, ids) = read_graph(graph, g.signed)?;
            let s = sample_tree(&graph, *kind, g.seed)?;
            writeln!(
                buf,
                "# kind={kind} seed={} walk_steps={}",
                g.seed, s.walk_steps
            )?;
            write_edge_list(s.tree.graph(), Some(&ids), &mut buf)?;
            Format::Tsv
        }
        Command::Predict {
            graph,
            train,
            test,
            algorithm,
            kind,
        } => {
            let (graph, ids) = read_graph(graph, g.signed)?;
            let n = graph.node_count();
            let pairs = load_labels(open(train)?, &ids)
                .with_context(|| format!("reading {}", train.display()))?;
            let train = RevealedState::from_pairs(n, pairs)?;
            let test = match test {
                Some(p) => read_nodes(p, &ids)?,
                None => (0..n).filter(|&v| !train.is_revealed(v)).collect(),
            };
            if g.signed && !matches!(algorithm, Algorithm::Shazoo | Algorithm::Omv) {
                bail!(ConfigError(format!(
                    "{algorithm} does not support signed graphs"
                )));
            }
            let preds = predict_graph(&graph, &train, &test, *algorithm, *kind, g.seed)?;
            let mut sorted = test.clone();
            sorted.sort_unstable();
            write_labels(
                sorted
                    .iter()
                    .map(|&v| (v, preds.get(v).expect("predicted"))),
                Some(&ids),
                &mut buf,
            )?;
            Format::Tsv
        }
        Command::Run(args) => {
            run(args, g, &mut buf)?;
            Format::Csv
        }
        Command::Adversary { tree, budget } => {
            let (graph, ids) = read_graph(tree, g.signed)?;
            let tree = as_tree(graph)?;
            let inst = adversarial_instance(&tree, *budget, &mut seeded_rng(g.seed))?;
            let report = cutsize_report(&tree, &inst.labeling)?;
            writeln!(
                buf,
                "# budget={budget} seed={} removed_edges={} components={} phi_w={}",
                g.seed,
                inst.removed_edges.len(),
                inst.component_count(),
                report.phi_w
            )?;
            write_labels(
                inst.labeling.iter().copied().enumerate(),
                Some(&ids),
                &mut buf,
            )?;
            Format::Tsv
        }
        Command::Audit { tree, labels } => {
            let tree_id = tree
                .file_stem()
                .map_or_else(|| "tree".into(), |s| s.to_string_lossy().into_owned());
            let (graph, ids) = read_graph(tree, g.signed)?;
            let t = as_tree(graph)?;
            let n = t.node_count();
            let pairs = load_labels(open(labels)?, &ids)
                .with_context(|| format!("reading {}", labels.display()))?;
            let y = full_labeling(pairs, n)?;
            let mut order: Vec<NodeId> = (0..n).collect();
            order.shuffle(&mut seeded_rng(g.seed));
            let trace = shazoo::run_online(&t, &y, &order)?;
            let report = cutsize_report(&t, &y)?;
            let gap = bound_gap_report(&trace, &report);
            writeln!(
                buf,
                "# order_seed={} default_predictions={} saturated={}",
                g.seed,
                trace.default_count(),
                gap.saturated
            )?;
            writeln!(buf, "{BOUND_CSV_HEADER}")?;
            write_bound_row(&mut buf, &tree_id, &report, &gap)?;
            Format::Csv
        }
    };
    emit(g, String::from_utf8(buf)?, native)
}

fn run(args: &RunArgs, g: &Global, buf: &mut Vec<u8>) -> Result<()> {
    let (graph, ids, mut notes) = match (&args.graph, &args.features) {
        (Some(p), _) => {
            let (graph, ids) = read_graph(p, g.signed)?;
            (graph, ids, Vec::new())
        }
        (None, Some(p)) => {
            let x = load_features(open(p)?).with_context(|| format!("reading {}", p.display()))?;
            let graph = knn_graph(&x, args.k)?;
            let n = graph.node_count();
            let notes = vec![
                ("knn_k".to_string(), args.k.to_string()),
                ("knn_symmetrization".to_string(), "union".to_string()),
            ];
            (graph, IdMap::identity(n), notes)
        }
        (None, None) => bail!(ConfigError(
            "one of --graph or --features is required".into()
        )),
    };
    let n = graph.node_count();
    let mut data = if args.multiclass {
        let pairs = load_classes(open(&args.labels)?, &ids)
            .with_context(|| format!("reading {}", args.labels.display()))?;
        if pairs.len() != n {
            return Err(shazoo::Error::PartialLabeling {
                expected: n,
                got: pairs.len(),
            }
            .into());
        }
        let mut classes = vec![String::new(); n];
        for (v, c) in pairs {
            classes[v] = c;
        }
        Dataset::multiclass(graph, &classes)?
    } else {
        let pairs = load_labels(open(&args.labels)?, &ids)
            .with_context(|| format!("reading {}", args.labels.display()))?;
        Dataset::binary(graph, full_labeling(pairs, n)?)?
    };
    notes.push(("labels".into(), args.labels.display().to_string()));
    data.notes = notes;
    let split = match &args.train_file {
        Some(p) => SplitSpec::Fixed(read_nodes(p, &ids)?),
        None => SplitSpec::Fraction(args.train_fraction),
    };
    let cfg = ExperimentConfig {
        algorithm: args.algorithm,
        tree_kind: args.kind,
        split,
        repetitions: args.repetitions,
        seed: g.seed,
        signed: g.signed,
        metric: args.metric,
    };
    run_experiment(&cfg, &data)?.write_csv(buf)?;
    Ok(())
}

//! Experiment pipeline: dataset preparation, metrics, synthetic data and
//! repeated train/test runs reported as CSV.

pub mod data;
pub mod experiment;
pub mod metrics;
pub mod report;
pub mod synth;

pub use data::{
    knn_graph, load_features, make_split, one_vs_all, BinaryTask, FeatureMatrix, Split,
};
pub use experiment::{
    predict_graph, run_experiment, Algorithm, Dataset, ExperimentConfig, ExperimentReport,
    SplitSpec, TaskRow,
};
pub use metrics::{score, Confusion, Metric};
pub use synth::{
    synth_planted_graph, synth_planted_tree, PlantedGraph, PlantedGraphParams, PlantedTree,
};

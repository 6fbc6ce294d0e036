//! Node-label prediction on weighted trees and graphs.
//!
//! The core predictor labels nodes of a weighted tree from the minimum
//! weighted cuts consistent with the labels revealed so far, copying the
//! sign of the nearest informative hinge node in resistance distance.
//! Graphs are reduced to trees by spanning-tree sampling. The crate also
//! ships the comparison baselines, lower-bound instrumentation and an
//! experiment harness.

pub mod audit;
pub mod baselines;
pub mod cut;
mod dsu;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hinge;
pub mod io;
pub mod label;
pub mod predictor;
pub mod spanning;

pub use cut::{
    batch_cut_all, batch_cut_all_with, cut_value, delta, fcut_value, signed_delta, CutMode,
    CutPair, CutTable,
};
pub use dsu::DisjointSets;
pub use error::{Error, Result};
pub use graph::{as_tree, Edge, EdgeId, NodeId, WeightedGraph, WeightedTree};
pub use hinge::{hinge_structure, HingeView};
pub use label::{Label, RevealedState};
pub use predictor::{
    predict_batch, predict_batch_with, predict_online, predict_online_with, predict_signed,
    run_online, run_online_with, MistakeTrace, Predictions,
};

//! Binary labels and the learner's view of revealed labels.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Neg, Label::Pos];

    /// The prediction issued when no evidence is available.
    pub const DEFAULT: Label = Label::Neg;

    pub fn value(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }

    /// Sign of `x` as a label; `None` for zero (and NaN).
    pub fn from_sign(x: f64) -> Option<Label> {
        if x > 0.0 {
            Some(Label::Pos)
        } else if x < 0.0 {
            Some(Label::Neg)
        } else {
            None
        }
    }

    /// Sign of `x`, with zero mapped to [`Label::DEFAULT`].
    pub fn sign_or_default(x: f64) -> Label {
        Label::from_sign(x).unwrap_or(Label::DEFAULT)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Neg => f.write_str("-1"),
            Label::Pos => f.write_str("+1"),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Label::Pos),
            "-1" | "-" => Ok(Label::Neg),
            other => Err(format!("invalid label {other:?}, expected +1 or -1")),
        }
    }
}

/// Labels observed so far, together with the order in which they arrived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealedState {
    labels: Vec<Option<Label>>,
    order: Vec<NodeId>,
}

impl RevealedState {
    pub fn new(n: usize) -> Self {
        Self {
            labels: vec![None; n],
            order: Vec::new(),
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (NodeId, Label)>) -> Result<Self> {
        let mut s = Self::new(n);
        for (node, label) in pairs {
            s.reveal(node, label)?;
        }
        Ok(s)
    }

    pub fn reveal(&mut self, node: NodeId, label: Label) -> Result<()> {
        let n = self.labels.len();
        let slot = self
            .labels
            .get_mut(node)
            .ok_or(Error::NodeOutOfRange { node, n })?;
        if slot.is_some() {
            return Err(Error::DuplicateReveal(node));
        }
        *slot = Some(label);
        self.order.push(node);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn label(&self, node: NodeId) -> Option<Label> {
        self.labels[node]
    }

    #[inline]
    pub fn is_revealed(&self, node: NodeId) -> bool {
        self.labels[node].is_some()
    }

    pub fn revealed_count(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    /// Revealed `(node, label)` pairs in revelation order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Label)> + '_ {
        self.order
            .iter()
            .map(move |&v| (v, self.labels[v].unwrap()))
    }

    /// Order-independent digest of the revealed labels.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.labels.hash(&mut h);
        h.finish()
    }
}

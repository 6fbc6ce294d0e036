//! Text formats: edge lists, label files and node-id maps.
//!
//! Edge lists hold one `u<TAB>v<TAB>w` triple per line, label files one
//! `node<TAB>label` pair per line. Any run of whitespace separates fields,
//! blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId, WeightedGraph};
use crate::label::Label;

/// Maps external node names to compact ids in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::new();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    pub ids: IdMap,
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let t = l.trim();
                if t.is_empty() || t.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_owned())))
                }
            }
        })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn load_edge_list<R: BufRead>(reader: R, signed: bool) -> Result<LoadedGraph> {
    let mut ids = IdMap::new();
    let mut edges = Vec::new();
    let mut seen = HashMap::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [a, b, w] = fields[..] else {
            return Err(parse_err(
                line,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        };
        let weight: f64 = w
            .parse()
            .map_err(|_| parse_err(line, format!("invalid weight {w:?}")))?;
        if !weight.is_finite() || weight == 0.0 {
            return Err(parse_err(
                line,
                format!("weight must be finite and nonzero, got {w}"),
            ));
        }
        if weight < 0.0 && !signed {
            return Err(parse_err(
                line,
                format!("negative weight {w} requires signed mode"),
            ));
        }
        if a == b {
            return Err(parse_err(line, format!("self-loop on {a}")));
        }
        let (u, v) = (ids.intern(a), ids.intern(b));
        if seen.insert((u.min(v), u.max(v)), line).is_some() {
            return Err(Error::DuplicateEdge {
                u: a.to_owned(),
                v: b.to_owned(),
                line,
            });
        }
        edges.push(Edge::new(u, v, weight));
    }
    let graph = WeightedGraph::new(ids.len(), edges, signed)?;
    Ok(LoadedGraph { graph, ids })
}

pub fn load_edge_list_str(text: &str, signed: bool) -> Result<LoadedGraph> {
    load_edge_list(text.as_bytes(), signed)
}

/// Writes `g` as an edge list, naming nodes through `ids` when given.
pub fn write_edge_list<W: Write>(g: &WeightedGraph, ids: Option<&IdMap>, mut out: W) -> Result<()> {
    let name = |v: NodeId| match ids {
        Some(m) => m.name(v).to_owned(),
        None => v.to_string(),
    };
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", name(e.u), name(e.v), e.weight)?;
    }
    Ok(())
}

/// Reads `node<TAB>±1` pairs; every node must already be known to `ids`.
pub fn load_labels<R: BufRead>(reader: R, ids: &IdMap) -> Result<Vec<(NodeId, Label)>> {
    load_pairs(reader, ids)?
        .into_iter()
        .map(|(line, node, tok)| {
            tok.parse::<Label>()
                .map(|l| (node, l))
                .map_err(|m| parse_err(line, m))
        })
        .collect()
}

/// Reads `node<TAB>class` pairs with arbitrary class tokens.
pub fn load_classes<R: BufRead>(reader: R, ids: &IdMap) -> Result<Vec<(NodeId, String)>> {
    Ok(load_pairs(reader, ids)?
        .into_iter()
        .map(|(_, node, tok)| (node, tok))
        .collect())
}

fn load_pairs<R: BufRead>(reader: R, ids: &IdMap) -> Result<Vec<(usize, NodeId, String)>> {
    let mut out = Vec::new();
    let mut seen = HashMap::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(parse_err(
                line,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        };
        let node = ids
            .get(a)
            .ok_or_else(|| parse_err(line, format!("unknown node {a:?}")))?;
        if let Some(prev) = seen.insert(node, line) {
            return Err(parse_err(
                line,
                format!("node {a:?} already listed at line {prev}"),
            ));
        }
        out.push((line, node, b.to_owned()));
    }
    Ok(out)
}

pub fn write_labels<W: Write>(
    labels: impl IntoIterator<Item = (NodeId, Label)>,
    ids: Option<&IdMap>,
    mut out: W,
) -> Result<()> {
    for (v, l) in labels {
        match ids {
            Some(m) => writeln!(out, "{}\t{}", m.name(v), l)?,
            None => writeln!(out, "{v}\t{l}")?,
        }
    }
    Ok(())
}

// SPDX-License-Identifier: Apache-2.0

//! Two-colour spider diagrams with directed wires, evaluated against an
//! observable pair and rewritten by fusion, Hopf, order-k and bialgebra
//! rules.
//!
//! A wire always runs from an output leg to an input leg, so every edge
//! evaluates as a plain index contraction. Reversing a wire between the two
//! colours is not free: it inserts the antipode.

mod gen;
mod io;
mod normal_form;
mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{contract_network, SemiTensor, C64};
use crate::error::{Error, Result};
use crate::observables::{ObservableStructure, PhaseAngles};
use crate::pairs::ObservablePair;

pub use gen::{random_diagram, random_fragment_diagram, RandomDiagramParams};
pub use io::{from_json, to_dot, to_json, DiagramJson};
pub use normal_form::{boundary_path_counts, is_three_layered, to_bialgebra_normal_form};
pub use rewrite::{
    apply_bipartite_bialgebra, eliminate_parallel_edges, find_bialgebra_collapse, find_bialgebra_expand, fuse_spiders,
    fuse_step, hopf_step, simplify, RewriteRule, RewriteStep,
};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Gray,
}

impl Color {
    pub fn other(self) -> Self {
        match self {
            Color::White => Color::Gray,
            Color::Gray => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Gray => "gray",
        })
    }
}

/// What sits inside a spider. Several points on one spider stand for their
/// product under that colour's multiplication.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoration {
    Angles(PhaseAngles),
    Points(Vec<Vec<C64>>),
}

impl Decoration {
    /// The decoration of two fused spiders.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Decoration::Angles(a), Decoration::Angles(b)) => Ok(Decoration::Angles(a.add(b)?)),
            (Decoration::Points(a), Decoration::Points(b)) => Ok(Decoration::Points(a.iter().chain(b).cloned().collect())),
            _ => Err(Error::IncompatibleDecorations("phase angles cannot fuse with explicit points".into())),
        }
    }

    fn combine_opt(a: Option<&Self>, b: Option<&Self>) -> Result<Option<Self>> {
        Ok(match (a, b) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => Some(x.combine(y)?),
        })
    }

    fn state(&self, o: &ObservableStructure) -> Result<SemiTensor> {
        match self {
            Decoration::Angles(t) => o.phase_from_angles(t),
            Decoration::Points(ps) => {
                let mut acc: Option<SemiTensor> = None;
                for p in ps {
                    let v = SemiTensor::column(o.semiring(), p.clone())?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => o.multiply_states(&a, &v)?,
                    });
                }
                acc.ok_or_else(|| Error::MalformedDiagram("empty point decoration".into()))
            }
        }
    }

    fn is_trivial(&self) -> bool {
        matches!(self, Decoration::Angles(t) if t.is_zero())
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoration::Angles(t) => write!(f, "{t}"),
            Decoration::Points(ps) => write!(f, "{} point(s)", ps.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub color: Color,
    pub decoration: Option<Decoration>,
}

/// One end of a wire: a spider or a numbered boundary slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Node(NodeId),
    Input(usize),
    Output(usize),
}

impl End {
    pub fn node(self) -> Option<NodeId> {
        match self {
            End::Node(v) => Some(v),
            _ => None,
        }
    }
}

/// A wire from an output leg of `source` to an input leg of `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: End,
    pub target: End,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagram {
    nodes: BTreeMap<NodeId, Node>,
    edges: Vec<Edge>,
    inputs: usize,
    outputs: usize,
}

impl Diagram {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Self { nodes: BTreeMap::new(), edges: Vec::new(), inputs, outputs }
    }

    /// A single spider wired to fresh boundary slots.
    pub fn spider(color: Color, n: usize, m: usize, decoration: Option<Decoration>) -> Self {
        let mut d = Self::new(n, m);
        let v = d.add_node(color, decoration);
        for i in 0..n {
            d.add_edge(End::Input(i), End::Node(v));
        }
        for j in 0..m {
            d.add_edge(End::Node(v), End::Output(j));
        }
        d
    }

    /// `n` bare wires.
    pub fn identity(n: usize) -> Self {
        let mut d = Self::new(n, n);
        for i in 0..n {
            d.add_edge(End::Input(i), End::Output(i));
        }
        d
    }

    /// The white `(0, n)` spider.
    pub fn ghz(n: usize) -> Self {
        Self::spider(Color::White, 0, n, None)
    }

    pub fn add_node(&mut self, color: Color, decoration: Option<Decoration>) -> NodeId {
        let id = self.nodes.keys().next_back().map_or(0, |k| k + 1);
        self.nodes.insert(id, Node { color, decoration });
        id
    }

    pub fn add_edge(&mut self, source: End, target: End) {
        self.edges.push(Edge { source, target });
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(&k, v)| (k, v))
    }

    pub fn node(&self, v: NodeId) -> Option<&Node> {
        self.nodes.get(&v)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn in_edges(&self, v: NodeId) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].target == End::Node(v)).collect()
    }

    pub fn out_edges(&self, v: NodeId) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].source == End::Node(v)).collect()
    }

    /// Edges running from `a` to `b`.
    pub fn edges_from_to(&self, a: NodeId, b: NodeId) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].source == End::Node(a) && self.edges[e].target == End::Node(b))
            .collect()
    }

    pub(crate) fn node_mut(&mut self, v: NodeId) -> &mut Node {
        self.nodes.get_mut(&v).expect("node exists")
    }

    pub(crate) fn remove_node(&mut self, v: NodeId) -> Node {
        self.nodes.remove(&v).expect("node exists")
    }

    pub(crate) fn edges_mut(&mut self) -> &mut Vec<Edge> {
        &mut self.edges
    }

    /// Removes the edges at the given indices.
    pub(crate) fn remove_edges(&mut self, mut idx: Vec<usize>) {
        idx.sort_unstable();
        idx.dedup();
        for e in idx.into_iter().rev() {
            self.edges.remove(e);
        }
    }

    /// Node ids renumbered `0..n` in order, edges sorted.
    pub fn canonical(&self) -> Self {
        let map: BTreeMap<NodeId, NodeId> = self.nodes.keys().enumerate().map(|(i, &k)| (k, i)).collect();
        let re = |e: End| match e {
            End::Node(v) => End::Node(map[&v]),
            other => other,
        };
        let mut edges: Vec<Edge> = self.edges.iter().map(|e| Edge { source: re(e.source), target: re(e.target) }).collect();
        edges.sort_by_key(|e| (e.source, e.target));
        Self {
            nodes: self.nodes.iter().map(|(k, n)| (map[k], n.clone())).collect(),
            edges,
            inputs: self.inputs,
            outputs: self.outputs,
        }
    }

    /// Every boundary slot used exactly once in the right role and every
    /// endpoint naming an existing node.
    pub fn validate(&self) -> Result<()> {
        let mut seen_in = vec![0usize; self.inputs];
        let mut seen_out = vec![0usize; self.outputs];
        for (k, e) in self.edges.iter().enumerate() {
            match e.source {
                End::Input(i) if i < self.inputs => seen_in[i] += 1,
                End::Node(v) if self.nodes.contains_key(&v) => {}
                other => return Err(Error::MalformedDiagram(format!("edge {k} starts at invalid end {other:?}"))),
            }
            match e.target {
                End::Output(j) if j < self.outputs => seen_out[j] += 1,
                End::Node(v) if self.nodes.contains_key(&v) => {}
                other => return Err(Error::MalformedDiagram(format!("edge {k} ends at invalid end {other:?}"))),
            }
        }
        if let Some(i) = seen_in.iter().position(|&c| c != 1) {
            return Err(Error::MalformedDiagram(format!("input {i} has {} wires", seen_in[i])));
        }
        if let Some(j) = seen_out.iter().position(|&c| c != 1) {
            return Err(Error::MalformedDiagram(format!("output {j} has {} wires", seen_out[j])));
        }
        Ok(())
    }

    /// Sequential composition: the outputs of `self` feed the inputs of `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.outputs != next.inputs {
            return Err(Error::ArityMismatch(format!("{} outputs feed {} inputs", self.outputs, next.inputs)));
        }
        self.validate()?;
        next.validate()?;
        let offset = self.nodes.keys().next_back().map_or(0, |k| k + 1);
        let mut d = Self::new(self.inputs, next.outputs);
        d.nodes = self.nodes.clone();
        for (k, n) in &next.nodes {
            d.nodes.insert(k + offset, n.clone());
        }
        let shift = |e: End| match e {
            End::Node(v) => End::Node(v + offset),
            other => other,
        };
        // what drives each output of `self`
        let mut driver = vec![End::Input(0); self.outputs];
        for e in &self.edges {
            match e.target {
                End::Output(j) => driver[j] = e.source,
                _ => d.edges.push(*e),
            }
        }
        for e in &next.edges {
            let source = match e.source {
                End::Input(i) => driver[i],
                other => shift(other),
            };
            d.edges.push(Edge { source, target: shift(e.target) });
        }
        Ok(d)
    }

    /// Parallel composition.
    pub fn beside(&self, other: &Self) -> Self {
        let offset = self.nodes.keys().next_back().map_or(0, |k| k + 1);
        let mut d = self.clone();
        d.inputs += other.inputs;
        d.outputs += other.outputs;
        for (k, n) in &other.nodes {
            d.nodes.insert(k + offset, n.clone());
        }
        let shift = |e: End| match e {
            End::Node(v) => End::Node(v + offset),
            End::Input(i) => End::Input(i + self.inputs),
            End::Output(j) => End::Output(j + self.outputs),
        };
        d.edges.extend(other.edges.iter().map(|e| Edge { source: shift(e.source), target: shift(e.target) }));
        d
    }

    /// Output slots permuted: output `j` of the result is output `perm[j]`
    /// of `self`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.outputs {
            return Err(Error::ArityMismatch("permutation length".into()));
        }
        let mut inv = vec![usize::MAX; perm.len()];
        for (j, &p) in perm.iter().enumerate() {
            if p >= perm.len() || inv[p] != usize::MAX {
                return Err(Error::ArityMismatch("not a permutation".into()));
            }
            inv[p] = j;
        }
        let mut d = self.clone();
        for e in &mut d.edges {
            if let End::Output(j) = e.target {
                e.target = End::Output(inv[j]);
            }
        }
        Ok(d)
    }
}

fn structure(pair: &ObservablePair, c: Color) -> &ObservableStructure {
    match c {
        Color::White => pair.white(),
        Color::Gray => pair.gray(),
    }
}

/// The tensor a diagram denotes in the model `pair`, with outputs before
/// inputs in boundary order.
pub fn evaluate(d: &Diagram, pair: &ObservablePair) -> Result<SemiTensor> {
    d.validate()?;
    let sr = pair.white().semiring();
    let dim = pair.dim();
    let n_edges = d.edges.len();
    let mut parts = Vec::with_capacity(d.nodes.len());
    for (&v, node) in &d.nodes {
        let o = structure(pair, node.color);
        let outs = d.out_edges(v);
        let ins = d.in_edges(v);
        let dec = match &node.decoration {
            Some(x) if !x.is_trivial() => Some(x.state(o)?),
            _ => None,
        };
        let t = o.spider(ins.len(), outs.len(), dec.as_ref())?;
        parts.push((t, outs.into_iter().chain(ins).collect::<Vec<_>>()));
    }
    let mut out_labels = vec![0; d.outputs];
    let mut in_labels = vec![0; d.inputs];
    for (k, e) in d.edges.iter().enumerate() {
        match (e.source, e.target) {
            (End::Input(i), End::Output(j)) => {
                // a bare wire gets its own identity so each label has two ends
                parts.push((SemiTensor::identity(sr, dim), vec![k, k + n_edges]));
                out_labels[j] = k;
                in_labels[i] = k + n_edges;
            }
            (End::Input(i), _) => in_labels[i] = k,
            (_, End::Output(j)) => out_labels[j] = k,
            _ => {}
        }
    }
    contract_network(sr, parts, &out_labels, &in_labels)
}

/// The scalar `s` with `eval(d1) = s · eval(d2)`, if one exists within `tol`.
pub fn equivalent(d1: &Diagram, d2: &Diagram, pair: &ObservablePair, tol: f64) -> Result<Option<C64>> {
    if d1.inputs != d2.inputs || d1.outputs != d2.outputs {
        return Err(Error::ArityMismatch(format!(
            "{}→{} against {}→{}",
            d1.inputs, d1.outputs, d2.inputs, d2.outputs
        )));
    }
    SemiTensor::equal_up_to_scalar(&evaluate(d1, pair)?, &evaluate(d2, pair)?, tol)
}

// SPDX-License-Identifier: Apache-2.0

//! JSON interchange and Graphviz export.
//!
//! ```json
//! {"nodes": [{"id": "a", "color": "white", "phase": ["0", "1/2"]}],
//!  "edges": [["in", "a"], ["a", "out"]],
//!  "inputs": ["in"], "outputs": ["out"]}
//! ```
//!
//! Each edge runs from its first entry to its second. Boundary names share
//! the namespace of node ids.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Color, Decoration, Diagram, End};
use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::observables::PhaseAngles;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: String,
    pub color: Color,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseAngles>,
    /// Explicit points as `[re, im]` pairs; several multiply together.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl DiagramJson {
    pub fn from_diagram(d: &Diagram) -> Self {
        let name = |e: End| match e {
            End::Node(v) => format!("v{v}"),
            End::Input(i) => format!("in{i}"),
            End::Output(j) => format!("out{j}"),
        };
        let nodes = d
            .nodes()
            .map(|(v, n)| {
                let (phase, points) = match &n.decoration {
                    None => (None, None),
                    Some(Decoration::Angles(t)) => (Some(t.clone()), None),
                    Some(Decoration::Points(ps)) => {
                        (None, Some(ps.iter().map(|p| p.iter().map(|z| [z.re, z.im]).collect()).collect()))
                    }
                };
                NodeJson { id: format!("v{v}"), color: n.color, phase, points }
            })
            .collect();
        Self {
            nodes,
            edges: d.edges().iter().map(|e| [name(e.source), name(e.target)]).collect(),
            inputs: (0..d.inputs()).map(|i| name(End::Input(i))).collect(),
            outputs: (0..d.outputs()).map(|j| name(End::Output(j))).collect(),
        }
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        let bad = |m: String| Error::MalformedDiagram(m);
        let mut d = Diagram::new(self.inputs.len(), self.outputs.len());
        let mut ends: HashMap<&str, End> = HashMap::new();
        for (i, s) in self.inputs.iter().enumerate() {
            if ends.insert(s.as_str(), End::Input(i)).is_some() {
                return Err(bad(format!("duplicate name {s:?}")));
            }
        }
        for (j, s) in self.outputs.iter().enumerate() {
            if ends.insert(s.as_str(), End::Output(j)).is_some() {
                return Err(bad(format!("duplicate name {s:?}")));
            }
        }
        for n in &self.nodes {
            let decoration = match (&n.phase, &n.points) {
                (None, None) => None,
                (Some(t), None) => Some(Decoration::Angles(t.clone())),
                (None, Some(ps)) if !ps.is_empty() => Some(Decoration::Points(
                    ps.iter().map(|p| p.iter().map(|z| C64::new(z[0], z[1])).collect()).collect(),
                )),
                (None, Some(_)) => return Err(bad(format!("node {:?} has an empty point list", n.id))),
                (Some(_), Some(_)) => {
                    return Err(Error::IncompatibleDecorations(format!("node {:?} has both a phase and points", n.id)))
                }
            };
            let v = d.add_node(n.color, decoration);
            if ends.insert(n.id.as_str(), End::Node(v)).is_some() {
                return Err(bad(format!("duplicate name {:?}", n.id)));
            }
        }
        for [a, b] in &self.edges {
            let s = *ends.get(a.as_str()).ok_or_else(|| bad(format!("unknown edge end {a:?}")))?;
            let t = *ends.get(b.as_str()).ok_or_else(|| bad(format!("unknown edge end {b:?}")))?;
            d.add_edge(s, t);
        }
        d.validate()?;
        Ok(d)
    }
}

pub fn from_json(text: &str) -> Result<Diagram> {
    serde_json::from_str::<DiagramJson>(text)?.to_diagram()
}

pub fn to_json(d: &Diagram) -> String {
    serde_json::to_string_pretty(&DiagramJson::from_diagram(d)).expect("plain data serialises")
}

/// Graphviz source: white spiders as white circles, gray spiders filled
/// gray, decorations as labels.
pub fn to_dot(d: &Diagram) -> String {
    let mut s = String::from("digraph diagram {\n  rankdir=BT;\n");
    for i in 0..d.inputs() {
        let _ = writeln!(s, "  in{i} [shape=point, xlabel=\"in{i}\"];");
    }
    for j in 0..d.outputs() {
        let _ = writeln!(s, "  out{j} [shape=point, xlabel=\"out{j}\"];");
    }
    for (v, n) in d.nodes() {
        let fill = match n.color {
            Color::White => "white",
            Color::Gray => "gray70",
        };
        let label = n.decoration.as_ref().map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(s, "  v{v} [shape=circle, style=filled, fillcolor={fill}, label=\"{label}\"];");
    }
    let name = |e: End| match e {
        End::Node(v) => format!("v{v}"),
        End::Input(i) => format!("in{i}"),
        End::Output(j) => format!("out{j}"),
    };
    for e in d.edges() {
        let _ = writeln!(s, "  {} -> {};", name(e.source), name(e.target));
    }
    s.push_str("}\n");
    s
}

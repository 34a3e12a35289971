// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{Color, Decoration, Diagram, Edge, End, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewriteRule {
    Fuse,
    ParallelK,
    Hopf,
    Bialgebra,
    NormalFormDrive,
}

/// One rule application. `result` agrees with the source diagram up to a
/// nonzero scalar in any model where the rule is valid.
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    pub nodes: Vec<NodeId>,
    pub result: Diagram,
}

fn undecorated(d: &Diagram, v: NodeId) -> bool {
    d.node(v).is_some_and(|n| n.decoration.as_ref().is_none_or(Decoration::is_trivial))
}

fn color(d: &Diagram, v: NodeId) -> Color {
    d.node(v).expect("node exists").color
}

/// One fusion step: drop the self-loops of a spider (specialness), or merge
/// the first pair of adjacent same-colour spiders.
pub fn fuse_step(d: &Diagram) -> Result<Option<RewriteStep>> {
    if let Some(v) = d.edges().iter().find_map(|e| e.source.node().filter(|&v| e.target == End::Node(v))) {
        let mut r = d.clone();
        let loops: Vec<usize> = r.edges_from_to(v, v);
        r.remove_edges(loops);
        return Ok(Some(RewriteStep { rule: RewriteRule::Fuse, nodes: vec![v], result: r }));
    }
    let hit = d.edges().iter().find_map(|e| match (e.source, e.target) {
        (End::Node(a), End::Node(b)) if a != b && color(d, a) == color(d, b) => Some((a.min(b), a.max(b))),
        _ => None,
    });
    let Some((a, b)) = hit else { return Ok(None) };
    let mut r = d.clone();
    let gone = r.remove_node(b);
    let merged = Decoration::combine_opt(r.node(a).and_then(|n| n.decoration.as_ref()), gone.decoration.as_ref())?;
    r.node_mut(a).decoration = merged;
    for e in r.edges_mut() {
        if e.source == End::Node(b) {
            e.source = End::Node(a);
        }
        if e.target == End::Node(b) {
            e.target = End::Node(a);
        }
    }
    let loops = r.edges_from_to(a, a);
    r.remove_edges(loops);
    Ok(Some(RewriteStep { rule: RewriteRule::Fuse, nodes: vec![a, b], result: r }))
}

/// Fusion to fixpoint. Every step removes a node or an edge.
pub fn fuse_spiders(d: &Diagram) -> Result<Diagram> {
    let mut cur = d.clone();
    while let Some(step) = fuse_step(&cur)? {
        cur = step.result;
    }
    Ok(cur)
}

/// Deletes `k` parallel same-direction wires between a white and a gray
/// spider. Valid when `k` is a multiple of the exponent of the pair's
/// scaled gray points.
pub fn eliminate_parallel_edges(d: &Diagram, k: usize) -> Option<RewriteStep> {
    if k == 0 {
        return None;
    }
    let pairs: Vec<(NodeId, NodeId)> = d
        .edges()
        .iter()
        .filter_map(|e| match (e.source, e.target) {
            (End::Node(a), End::Node(b)) if color(d, a) != color(d, b) => Some((a, b)),
            _ => None,
        })
        .collect();
    for (a, b) in pairs {
        let bundle = d.edges_from_to(a, b);
        if bundle.len() >= k {
            let mut r = d.clone();
            r.remove_edges(bundle[..k].to_vec());
            return Some(RewriteStep { rule: RewriteRule::ParallelK, nodes: vec![a, b], result: r });
        }
    }
    None
}

/// Deletes a pair of opposite-direction wires between a white and a gray
/// spider. The backward wire carries the antipode, so this is the Hopf law.
pub fn hopf_step(d: &Diagram) -> Option<RewriteStep> {
    for e in d.edges() {
        if let (End::Node(a), End::Node(b)) = (e.source, e.target) {
            if color(d, a) == color(d, b) {
                continue;
            }
            let back = d.edges_from_to(b, a);
            if let Some(&f) = back.first() {
                let fwd = d.edges_from_to(a, b)[0];
                let mut r = d.clone();
                r.remove_edges(vec![fwd, f]);
                let (w, g) = if color(d, a) == Color::White { (a, b) } else { (b, a) };
                return Some(RewriteStep { rule: RewriteRule::Hopf, nodes: vec![w, g], result: r });
            }
        }
    }
    None
}

/// A white spider with a single output wired straight into a gray spider
/// with a single input: the collapsed side of the bialgebra law.
pub fn find_bialgebra_expand(d: &Diagram) -> Option<Vec<NodeId>> {
    d.edges().iter().find_map(|e| match (e.source, e.target) {
        (End::Node(w), End::Node(g)) if expandable(d, w, g) => Some(vec![w, g]),
        _ => None,
    })
}

fn expandable(d: &Diagram, w: NodeId, g: NodeId) -> bool {
    w != g
        && color(d, w) == Color::White
        && color(d, g) == Color::Gray
        && undecorated(d, w)
        && undecorated(d, g)
        && d.out_edges(w).len() == 1
        && d.in_edges(g).len() == 1
        && d.edges_from_to(w, g).len() == 1
        && d.edges_from_to(g, w).is_empty()
}

/// A complete bipartite region of gray copy spiders feeding white merge
/// spiders, larger than a single pair.
pub fn find_bialgebra_collapse(d: &Diagram) -> Option<Vec<NodeId>> {
    for (g, n) in d.nodes() {
        if n.color != Color::Gray || d.in_edges(g).len() != 1 {
            continue;
        }
        let mut ws: Vec<NodeId> = d.out_edges(g).iter().filter_map(|&e| d.edges()[e].target.node()).collect();
        ws.sort_unstable();
        ws.dedup();
        let mut gs: Vec<NodeId> = ws
            .iter()
            .flat_map(|&w| d.in_edges(w))
            .filter_map(|e| d.edges()[e].source.node())
            .collect();
        gs.sort_unstable();
        gs.dedup();
        if gs.len() * ws.len() > 1 && check_collapse(d, &gs, &ws).is_ok() {
            return Some(gs.into_iter().chain(ws).collect());
        }
    }
    None
}

fn check_collapse(d: &Diagram, gs: &[NodeId], ws: &[NodeId]) -> Result<()> {
    let bad = |msg: &str| Err(Error::NoMatch(format!("bialgebra collapse: {msg}")));
    if gs.is_empty() || ws.is_empty() {
        return bad("needs both colours");
    }
    for &g in gs {
        if color(d, g) != Color::Gray || !undecorated(d, g) {
            return bad("gray side must be undecorated gray spiders");
        }
        let ins = d.in_edges(g);
        if ins.len() != 1 || d.edges()[ins[0]].source.node().is_some_and(|s| gs.contains(&s) || ws.contains(&s)) {
            return bad("each gray spider needs exactly one input from outside the region");
        }
        let outs = d.out_edges(g);
        if outs.len() != ws.len() || ws.iter().any(|&w| d.edges_from_to(g, w).len() != 1) {
            return bad("each gray spider must feed every white spider exactly once");
        }
    }
    for &w in ws {
        if color(d, w) != Color::White || !undecorated(d, w) {
            return bad("white side must be undecorated white spiders");
        }
        if d.in_edges(w).len() != gs.len() {
            return bad("white spiders may only be fed by the gray side");
        }
        let outs = d.out_edges(w);
        if outs.len() != 1 || d.edges()[outs[0]].target.node().is_some_and(|t| gs.contains(&t) || ws.contains(&t)) {
            return bad("each white spider needs exactly one output leaving the region");
        }
    }
    Ok(())
}

/// The generalised bialgebra law on the matched nodes. Two nodes joined
/// white → gray expand into the complete bipartite gray → white graph; a
/// complete bipartite gray → white region collapses to a single white →
/// gray pair. The model must be strongly complementary.
pub fn apply_bipartite_bialgebra(d: &Diagram, matched: &[NodeId]) -> Result<RewriteStep> {
    if let [a, b] = *matched {
        for (w, g) in [(a, b), (b, a)] {
            if d.node(w).is_some() && d.node(g).is_some() && expandable(d, w, g) {
                return Ok(expand(d, w, g));
            }
        }
    }
    let mut gs = Vec::new();
    let mut ws = Vec::new();
    for &v in matched {
        match d.node(v).map(|n| n.color) {
            Some(Color::Gray) => gs.push(v),
            Some(Color::White) => ws.push(v),
            None => return Err(Error::NoMatch(format!("node {v} does not exist"))),
        }
    }
    gs.sort_unstable();
    gs.dedup();
    ws.sort_unstable();
    ws.dedup();
    check_collapse(d, &gs, &ws)?;
    Ok(collapse(d, &gs, &ws))
}

fn expand(d: &Diagram, w: NodeId, g: NodeId) -> RewriteStep {
    let mut r = d.clone();
    let ins = d.in_edges(w);
    let outs = d.out_edges(g);
    r.remove_node(w);
    r.remove_node(g);
    let grays: Vec<NodeId> = ins.iter().map(|_| r.add_node(Color::Gray, None)).collect();
    let whites: Vec<NodeId> = outs.iter().map(|_| r.add_node(Color::White, None)).collect();
    let mut edges: Vec<Edge> = Vec::new();
    for (&e, &x) in ins.iter().zip(&grays) {
        edges.push(Edge { source: d.edges()[e].source, target: End::Node(x) });
    }
    for &x in &grays {
        for &y in &whites {
            edges.push(Edge { source: End::Node(x), target: End::Node(y) });
        }
    }
    for (&f, &y) in outs.iter().zip(&whites) {
        edges.push(Edge { source: End::Node(y), target: d.edges()[f].target });
    }
    let touched: Vec<usize> = (0..d.edges().len())
        .filter(|&e| [w, g].iter().any(|&v| d.edges()[e].source == End::Node(v) || d.edges()[e].target == End::Node(v)))
        .collect();
    r.remove_edges(touched);
    r.edges_mut().extend(edges);
    RewriteStep { rule: RewriteRule::Bialgebra, nodes: vec![w, g], result: r }
}

fn collapse(d: &Diagram, gs: &[NodeId], ws: &[NodeId]) -> RewriteStep {
    let mut r = d.clone();
    let sources: Vec<End> = gs.iter().map(|&g| d.edges()[d.in_edges(g)[0]].source).collect();
    let targets: Vec<End> = ws.iter().map(|&w| d.edges()[d.out_edges(w)[0]].target).collect();
    let region: Vec<NodeId> = gs.iter().chain(ws).copied().collect();
    let touched: Vec<usize> = (0..d.edges().len())
        .filter(|&e| {
            let ed = d.edges()[e];
            region.iter().any(|&v| ed.source == End::Node(v) || ed.target == End::Node(v))
        })
        .collect();
    r.remove_edges(touched);
    for &v in &region {
        r.remove_node(v);
    }
    let w = r.add_node(Color::White, None);
    let g = r.add_node(Color::Gray, None);
    for s in sources {
        r.add_edge(s, End::Node(w));
    }
    r.add_edge(End::Node(w), End::Node(g));
    for t in targets {
        r.add_edge(End::Node(g), t);
    }
    RewriteStep { rule: RewriteRule::Bialgebra, nodes: region, result: r }
}

/// Shrinking rules to fixpoint with priority fuse > parallel-k > hopf. The
/// bialgebra law can grow a diagram and is left out. Parallel-edge
/// elimination runs only when `k` is given.
pub fn simplify(d: &Diagram, k: Option<usize>) -> Result<(Diagram, Vec<RewriteStep>)> {
    let mut cur = d.clone();
    let mut steps = Vec::new();
    loop {
        let step = match fuse_step(&cur)? {
            Some(s) => Some(s),
            None => k.and_then(|k| eliminate_parallel_edges(&cur, k)).or_else(|| hopf_step(&cur)),
        };
        match step {
            Some(s) => {
                cur = s.result.clone();
                steps.push(s);
            }
            None => return Ok((cur, steps)),
        }
    }
}

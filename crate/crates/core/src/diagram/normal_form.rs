// SPDX-License-Identifier: Apache-2.0

//! Normal form for diagrams built only from the gray comonoid and the white
//! monoid: a layer of gray copy spiders on the inputs, a wiring, and a layer
//! of white merge spiders on the outputs. The wiring is fixed by counting
//! directed paths from each input to each output.

use std::collections::BTreeMap;

use super::{Color, Decoration, Diagram, End, NodeId};
use crate::error::{Error, Result};

fn outside(msg: impl Into<String>) -> Error {
    Error::OutsideFragment(msg.into())
}

/// Nodes in an order where every wire points forward, if one exists.
fn topological_order(d: &Diagram) -> Option<Vec<NodeId>> {
    let ids: Vec<NodeId> = d.nodes().map(|(v, _)| v).collect();
    let mut indegree: BTreeMap<NodeId, usize> = ids
        .iter()
        .map(|&v| (v, d.in_edges(v).iter().filter(|&&e| d.edges()[e].source.node().is_some()).count()))
        .collect();
    let mut ready: Vec<NodeId> = ids.iter().copied().filter(|v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(ids.len());
    while let Some(v) = ready.pop() {
        order.push(v);
        for e in d.out_edges(v) {
            if let End::Node(t) = d.edges()[e].target {
                let c = indegree.get_mut(&t).expect("node exists");
                *c -= 1;
                if *c == 0 {
                    ready.push(t);
                }
            }
        }
    }
    (order.len() == ids.len()).then_some(order)
}

/// Number of directed paths from input `i` to output `j`, for diagrams
/// without directed cycles.
pub fn boundary_path_counts(d: &Diagram) -> Result<Vec<Vec<u64>>> {
    d.validate()?;
    let order = topological_order(d).ok_or_else(|| outside("diagram has a directed cycle"))?;
    let n_in = d.inputs();
    let carried = |src: End, reach: &BTreeMap<NodeId, Vec<u64>>| -> Vec<u64> {
        match src {
            End::Input(i) => (0..n_in).map(|k| u64::from(k == i)).collect(),
            End::Node(v) => reach[&v].clone(),
            End::Output(_) => unreachable!("validated"),
        }
    };
    let mut reach = BTreeMap::new();
    for v in order {
        let mut acc = vec![0u64; n_in];
        for e in d.in_edges(v) {
            for (a, x) in acc.iter_mut().zip(carried(d.edges()[e].source, &reach)) {
                *a = a.saturating_add(x);
            }
        }
        reach.insert(v, acc);
    }
    let mut counts = vec![vec![0u64; d.outputs()]; n_in];
    for e in d.edges() {
        if let End::Output(j) = e.target {
            for (i, x) in carried(e.source, &reach).into_iter().enumerate() {
                counts[i][j] = x;
            }
        }
    }
    Ok(counts)
}

fn check_fragment(d: &Diagram) -> Result<()> {
    for (v, n) in d.nodes() {
        if n.decoration.as_ref().is_some_and(|x| !Decoration::is_trivial(x)) {
            return Err(outside(format!("node {v} is decorated")));
        }
        match n.color {
            Color::Gray if d.in_edges(v).len() != 1 => {
                return Err(outside(format!("gray node {v} has {} inputs; only copy spiders allowed", d.in_edges(v).len())))
            }
            Color::White if d.out_edges(v).len() != 1 => {
                return Err(outside(format!("white node {v} has {} outputs; only merge spiders allowed", d.out_edges(v).len())))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Gray copy layer, wiring, white merge layer. Spiders with one input and
/// one output are left out, so bare wires stay bare.
pub fn to_bialgebra_normal_form(d: &Diagram) -> Result<Diagram> {
    check_fragment(d)?;
    let counts = boundary_path_counts(d)?;
    let (n_in, n_out) = (d.inputs(), d.outputs());
    let row: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<u64> = (0..n_out).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    let mut nf = Diagram::new(n_in, n_out);
    let gray: Vec<End> = (0..n_in)
        .map(|i| if row[i] == 1 { End::Input(i) } else { End::Node(nf.add_node(Color::Gray, None)) })
        .collect();
    let white: Vec<End> = (0..n_out)
        .map(|j| if col[j] == 1 { End::Output(j) } else { End::Node(nf.add_node(Color::White, None)) })
        .collect();
    for (i, g) in gray.iter().enumerate() {
        if let End::Node(_) = g {
            nf.add_edge(End::Input(i), *g);
        }
    }
    for i in 0..n_in {
        for j in 0..n_out {
            for _ in 0..counts[i][j] {
                nf.add_edge(gray[i], white[j]);
            }
        }
    }
    for (j, w) in white.iter().enumerate() {
        if let End::Node(_) = w {
            nf.add_edge(*w, End::Output(j));
        }
    }
    nf.validate()?;
    Ok(nf)
}

/// Whether every wire runs input → gray → white → output, skipping layers
/// only forwards, with gray spiders fed by one input and white spiders
/// feeding one output.
pub fn is_three_layered(d: &Diagram) -> bool {
    let layer = |e: End| match e {
        End::Input(_) => 0,
        End::Node(v) => match d.node(v).map(|n| n.color) {
            Some(Color::Gray) => 1,
            Some(Color::White) => 2,
            None => 9,
        },
        End::Output(_) => 3,
    };
    let wires_ok = d.edges().iter().all(|e| layer(e.source) < layer(e.target) && layer(e.target) <= 3);
    let gray_ok = d.nodes().filter(|(_, n)| n.color == Color::Gray).all(|(v, _)| {
        let ins = d.in_edges(v);
        ins.len() == 1 && matches!(d.edges()[ins[0]].source, End::Input(_))
    });
    let white_ok = d.nodes().filter(|(_, n)| n.color == Color::White).all(|(v, _)| {
        let outs = d.out_edges(v);
        outs.len() == 1 && matches!(d.edges()[outs[0]].target, End::Output(_))
    });
    let undecorated = d.nodes().all(|(_, n)| n.decoration.as_ref().is_none_or(Decoration::is_trivial));
    wires_ok && gray_ok && white_ok && undecorated
}

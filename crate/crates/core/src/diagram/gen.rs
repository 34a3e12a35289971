// SPDX-License-Identifier: Apache-2.0

//! Random diagrams for property tests and benchmarks.

use num_rational::Rational64;
use rand::Rng;

use super::{Color, Decoration, Diagram, End};
use crate::observables::PhaseAngles;

#[derive(Clone, Debug)]
pub struct RandomDiagramParams {
    pub max_spiders: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Wires added on top of a spanning tree.
    pub max_extra_edges: usize,
    /// Chance that an extra wire is repeated into a bundle of 2 or 3.
    pub bundle_prob: f64,
    pub decorate_prob: f64,
    /// Phase angles are multiples of `1 / phase_denominator` turns.
    pub phase_denominator: i64,
}

impl Default for RandomDiagramParams {
    fn default() -> Self {
        Self {
            max_spiders: 6,
            max_inputs: 2,
            max_outputs: 2,
            max_extra_edges: 3,
            bundle_prob: 0.3,
            decorate_prob: 0.4,
            phase_denominator: 12,
        }
    }
}

fn random_color<R: Rng>(rng: &mut R) -> Color {
    if rng.random_bool(0.5) {
        Color::White
    } else {
        Color::Gray
    }
}

/// A connected two-colour diagram on `1..=max_spiders` spiders whose phase
/// decorations have `dim` entries.
pub fn random_diagram<R: Rng>(rng: &mut R, params: &RandomDiagramParams, dim: usize) -> Diagram {
    let n = rng.random_range(1..=params.max_spiders.max(1));
    let mut d = Diagram::new(rng.random_range(0..=params.max_inputs), rng.random_range(0..=params.max_outputs));
    let ids: Vec<usize> = (0..n)
        .map(|_| {
            let dec = (dim > 0 && rng.random_bool(params.decorate_prob)).then(|| {
                let den = params.phase_denominator.max(1);
                let turns = (0..dim)
                    .map(|k| if k == 0 { Rational64::from_integer(0) } else { Rational64::new(rng.random_range(0..den), den) })
                    .collect();
                Decoration::Angles(PhaseAngles::new(turns).expect("r_0 = 0"))
            });
            d.add_node(random_color(rng), dec)
        })
        .collect();
    let wire = |d: &mut Diagram, rng: &mut R, a: usize, b: usize| {
        if rng.random_bool(0.5) {
            d.add_edge(End::Node(a), End::Node(b));
        } else {
            d.add_edge(End::Node(b), End::Node(a));
        }
    };
    for k in 1..n {
        let j = rng.random_range(0..k);
        wire(&mut d, rng, ids[k], ids[j]);
    }
    for _ in 0..rng.random_range(0..=params.max_extra_edges) {
        let a = ids[rng.random_range(0..n)];
        let b = ids[rng.random_range(0..n)];
        let copies = if rng.random_bool(params.bundle_prob) { rng.random_range(2..=3) } else { 1 };
        let forward = rng.random_bool(0.5);
        for _ in 0..copies {
            if forward {
                d.add_edge(End::Node(a), End::Node(b));
            } else {
                d.add_edge(End::Node(b), End::Node(a));
            }
        }
    }
    for i in 0..d.inputs() {
        let v = ids[rng.random_range(0..n)];
        d.add_edge(End::Input(i), End::Node(v));
    }
    for j in 0..d.outputs() {
        let v = ids[rng.random_range(0..n)];
        d.add_edge(End::Node(v), End::Output(j));
    }
    d
}

/// A diagram built only from gray copy spiders (one input) and white merge
/// spiders (one output), wired without directed cycles.
pub fn random_fragment_diagram<R: Rng>(rng: &mut R, max_spiders: usize, max_inputs: usize, max_outputs: usize) -> Diagram {
    let inputs = rng.random_range(1..=max_inputs.max(1));
    let mut open: Vec<End> = (0..inputs).map(End::Input).collect();
    let mut d = Diagram::new(inputs, 0);
    for _ in 0..rng.random_range(1..=max_spiders.max(1)) {
        if !open.is_empty() && rng.random_bool(0.5) {
            let src = open.remove(rng.random_range(0..open.len()));
            let g = d.add_node(Color::Gray, None);
            d.add_edge(src, End::Node(g));
            for _ in 0..rng.random_range(0..=3usize) {
                open.push(End::Node(g));
            }
        } else {
            let take = rng.random_range(0..=open.len().min(3));
            let w = d.add_node(Color::White, None);
            for _ in 0..take {
                let src = open.remove(rng.random_range(0..open.len()));
                d.add_edge(src, End::Node(w));
            }
            open.push(End::Node(w));
        }
    }
    while open.len() > max_outputs.max(1) {
        let w = d.add_node(Color::White, None);
        for _ in 0..2 {
            let src = open.remove(rng.random_range(0..open.len()));
            d.add_edge(src, End::Node(w));
        }
        open.push(End::Node(w));
    }
    let mut out = Diagram::new(inputs, open.len());
    out.nodes = d.nodes.clone();
    out.edges = d.edges.clone();
    for (j, src) in open.into_iter().enumerate() {
        out.add_edge(src, End::Output(j));
    }
    out
}

// SPDX-License-Identifier: Apache-2.0

//! Observables in the category of finite sets and relations.

use std::fmt;

use serde::Serialize;

use crate::algebra::{SemiTensor, Semiring};
use crate::error::{Error, Result};
use crate::observables::ObservableStructure;
use crate::pairs::ObservablePair;

const B: Semiring = Semiring::Boolean;

/// The structure on `0..d` whose comultiplication relates `x` to the pairs
/// `comult[x]` and whose counit holds exactly at `counit`.
pub fn relational_structure(name: &str, d: usize, comult: &[Vec<(usize, usize)>], counit: &[usize]) -> Result<ObservableStructure> {
    if comult.len() != d || comult.iter().flatten().any(|&(a, b)| a >= d || b >= d) || counit.iter().any(|&x| x >= d) {
        return Err(Error::DimensionMismatch(format!("relation does not live on {d} elements")));
    }
    let mult = SemiTensor::from_fn(B, vec![d], vec![d, d], |o, i| {
        if comult[o[0]].contains(&(i[0], i[1])) { B.one() } else { B.zero() }
    });
    let unit = SemiTensor::from_fn(B, vec![d], vec![], |o, _| if counit.contains(&o[0]) { B.one() } else { B.zero() });
    ObservableStructure::new(name, mult, unit)
}

/// White copies `{0, 1}`; gray sends `0` to `{(0,0), (1,1)}` and `1` to
/// `{(0,1), (1,0)}`, with counit `{0}`.
pub fn frel_z2_pair() -> ObservablePair {
    let white = ObservableStructure::copy(B, 2).with_name("frel:copy");
    let gray = relational_structure("frel:parity", 2, &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]], &[0])
        .expect("two-element relation");
    ObservablePair::new(white, gray).expect("both structures live on two elements")
}

/// One entry of the printed four-element structure, numbered from 1 as
/// printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "entry", rename_all = "kebab-case")]
pub enum RelationEdit {
    Source { line: usize, from: usize, to: usize },
    Pair { line: usize, slot: usize, from: (usize, usize), to: (usize, usize) },
    Counit { slot: usize, from: usize, to: usize },
}

impl fmt::Display for RelationEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RelationEdit::Source { line, from, to } => write!(f, "line {line}: source {from} -> {to}"),
            RelationEdit::Pair { line, slot, from, to } => {
                write!(f, "line {line}, pair {slot}: ({},{}) -> ({},{})", from.0, from.1, to.0, to.1)
            }
            RelationEdit::Counit { slot, from, to } => write!(f, "counit element {slot}: {from} -> {to}"),
        }
    }
}

/// The four-element structure as usually printed: `1 ∼ {(1,1),(2,2)}`,
/// `1 ∼ {(1,2),(2,1)}`, `3 ∼ {(3,4),(4,3)}`, `4 ∼ {(3,3),(3,3)}`, counit
/// `{1, 3}`. It fails the laws.
pub const PRINTED_SPEK_LINES: [(usize, [(usize, usize); 2]); 4] =
    [(1, [(1, 1), (2, 2)]), (1, [(1, 2), (2, 1)]), (3, [(3, 4), (4, 3)]), (4, [(3, 3), (3, 3)])];
pub const PRINTED_SPEK_COUNIT: [usize; 2] = [1, 3];

/// Largest number of single-entry edits tried when repairing the printed
/// relation.
pub const MAX_SPEK_EDITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Source(usize),
    Pair(usize, usize),
    Counit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Printed {
    sources: [usize; 4],
    pairs: [[(usize, usize); 2]; 4],
    counit: [usize; 2],
}

impl Printed {
    fn original() -> Self {
        Self {
            sources: PRINTED_SPEK_LINES.map(|l| l.0),
            pairs: PRINTED_SPEK_LINES.map(|l| l.1),
            counit: PRINTED_SPEK_COUNIT,
        }
    }

    /// `δ(x)` as bit masks over pairs `4a + b`, zero-based, and `ε` as a mask.
    fn masks(&self) -> ([u16; 4], u8) {
        let mut delta = [0u16; 4];
        for (line, &src) in self.sources.iter().enumerate() {
            for &(a, b) in &self.pairs[line] {
                delta[src - 1] |= 1 << (4 * (a - 1) + (b - 1));
            }
        }
        let eps = self.counit.iter().fold(0u8, |m, &x| m | 1 << (x - 1));
        (delta, eps)
    }

    fn alternatives(&self, slot: Slot) -> Vec<(Printed, RelationEdit)> {
        let mut out = Vec::new();
        match slot {
            Slot::Source(line) => {
                for to in 1..=4 {
                    let from = self.sources[line];
                    if to != from {
                        let mut p = *self;
                        p.sources[line] = to;
                        out.push((p, RelationEdit::Source { line: line + 1, from, to }));
                    }
                }
            }
            Slot::Pair(line, k) => {
                for a in 1..=4 {
                    for b in 1..=4 {
                        let from = self.pairs[line][k];
                        if (a, b) != from {
                            let mut p = *self;
                            p.pairs[line][k] = (a, b);
                            out.push((p, RelationEdit::Pair { line: line + 1, slot: k + 1, from, to: (a, b) }));
                        }
                    }
                }
            }
            Slot::Counit(k) => {
                for to in 1..=4 {
                    let from = self.counit[k];
                    if to != from {
                        let mut p = *self;
                        p.counit[k] = to;
                        out.push((p, RelationEdit::Counit { slot: k + 1, from, to }));
                    }
                }
            }
        }
        out
    }
}

/// Counit laws and cocommutativity on the bit masks, a cheap filter ahead
/// of the full law check.
fn quick_laws(delta: &[u16; 4], eps: u8) -> bool {
    for x in 0..4 {
        let mut left = 0u8;
        let mut right = 0u8;
        for a in 0..4 {
            for b in 0..4 {
                if delta[x] & (1 << (4 * a + b)) != 0 {
                    if eps & (1 << a) != 0 {
                        left |= 1 << b;
                    }
                    if eps & (1 << b) != 0 {
                        right |= 1 << a;
                    }
                    if delta[x] & (1 << (4 * b + a)) == 0 {
                        return false;
                    }
                }
            }
        }
        if left != 1 << x || right != 1 << x {
            return false;
        }
    }
    true
}

fn structure_from(p: &Printed) -> Result<ObservableStructure> {
    let (delta, eps) = p.masks();
    let comult: Vec<Vec<(usize, usize)>> = delta
        .iter()
        .map(|m| (0..16).filter(|k| m & (1 << k) != 0).map(|k| (k / 4, k % 4)).collect())
        .collect();
    let counit: Vec<usize> = (0..4).filter(|x| eps & (1 << x) != 0).collect();
    relational_structure("frel:spek", 4, &comult, &counit)
}

#[derive(Clone, Debug)]
pub struct SpekObservable {
    pub structure: ObservableStructure,
    /// Edits applied to the printed relation, fewest first.
    pub corrections: Vec<RelationEdit>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in combinations(n - first - 1, k - 1) {
            let mut c = vec![first];
            c.extend(rest.into_iter().map(|r| r + first + 1));
            out.push(c);
        }
    }
    out
}

/// The printed four-element structure, repaired by the fewest single-entry
/// edits (a line's source, one pair, or one counit element) that make every
/// law hold exactly. Ties are broken by entry order.
pub fn spek_observable() -> Result<SpekObservable> {
    let base = Printed::original();
    let slots: Vec<Slot> = (0..4)
        .map(Slot::Source)
        .chain((0..4).flat_map(|l| (0..2).map(move |k| Slot::Pair(l, k))))
        .chain((0..2).map(Slot::Counit))
        .collect();
    for depth in 0..=MAX_SPEK_EDITS {
        for combo in combinations(slots.len(), depth) {
            let mut frontier = vec![(base, Vec::new())];
            for &s in &combo {
                frontier = frontier
                    .into_iter()
                    .flat_map(|(p, edits): (Printed, Vec<RelationEdit>)| {
                        p.alternatives(slots[s]).into_iter().map(move |(q, e)| {
                            let mut es = edits.clone();
                            es.push(e);
                            (q, es)
                        })
                    })
                    .collect();
            }
            for (p, edits) in frontier {
                let (delta, eps) = p.masks();
                if !quick_laws(&delta, eps) {
                    continue;
                }
                let structure = structure_from(&p)?;
                if structure.check_laws(0.0).all_hold() {
                    return Ok(SpekObservable { structure, corrections: edits });
                }
            }
        }
    }
    Err(Error::ModelLoad(
        "frel:spek".into(),
        format!("no repair of the printed relation with at most {MAX_SPEK_EDITS} edits satisfies the laws"),
    ))
}

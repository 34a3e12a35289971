// SPDX-License-Identifier: Apache-2.0

use crate::algebra::{classify_table, FiniteAbelianGroup, SemiTensor, Semiring, C64};
use crate::error::{Error, Result};
use crate::observables::{is_phase_point, is_unitary, ObservableStructure};

const MAX_BOOLEAN_DIM: usize = 8;

#[derive(Clone, Debug)]
pub struct PhaseGroup {
    pub elements: Vec<SemiTensor>,
    /// `table[a][b]` is the index of `μ(ψ_a ⊗ ψ_b)`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub group: FiniteAbelianGroup,
    /// Whether every phase's `(1,1)` spider is unitary.
    pub gates_unitary: bool,
}

fn all_boolean_points(d: usize) -> Result<Vec<SemiTensor>> {
    if d > MAX_BOOLEAN_DIM {
        return Err(Error::PointsUnavailable(format!("boolean dimension {d} exceeds {MAX_BOOLEAN_DIM}")));
    }
    let s = Semiring::Boolean;
    Ok((1u32..1 << d)
        .map(|mask| SemiTensor::from_fn(s, vec![d], vec![], |i, _| if mask & (1 << i[0]) != 0 { s.one() } else { s.zero() }))
        .collect())
}

/// The candidates satisfying `μ(ψ ⊗ ψ_*) = η`, with their multiplication
/// table and isomorphism type. Boolean structures default to every nonzero
/// point; complex ones need a candidate set.
pub fn enumerate_phase_group(o: &ObservableStructure, candidates: Option<&[SemiTensor]>, tol: f64) -> Result<PhaseGroup> {
    let boolean = o.semiring().is_boolean();
    let pool = match candidates {
        Some(c) => c.to_vec(),
        None if boolean => all_boolean_points(o.dim())?,
        None => {
            return Err(Error::PointsUnavailable(format!("{} is complex; pass a finite candidate set", o.name())));
        }
    };
    let tol = if boolean { 0.0 } else { tol };
    let elements: Vec<SemiTensor> = pool.into_iter().filter(|p| is_phase_point(o, p, tol)).collect();
    if elements.is_empty() {
        return Err(Error::Closure(format!("no candidate is a phase of {}", o.name())));
    }
    let find = |x: &SemiTensor| -> Result<Option<usize>> {
        for (k, e) in elements.iter().enumerate() {
            if x.max_abs_diff(e)? <= tol {
                return Ok(Some(k));
            }
        }
        Ok(None)
    };
    let n = elements.len();
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let prod = o.multiply_states(&elements[a], &elements[b])?;
            table[a][b] = find(&prod)?
                .ok_or_else(|| Error::Closure(format!("the product of phases {a} and {b} is not among the candidates")))?;
        }
    }
    let group = classify_table(&table).map_err(|e| Error::Closure(e.to_string()))?.canonical();
    let identity = find(o.unit())?.ok_or_else(|| Error::Closure("the unit is not among the candidates".into()))?;
    let gates_unitary = elements
        .iter()
        .all(|p| o.phase_gate(p).is_ok_and(|u| is_unitary(&u, tol)));
    Ok(PhaseGroup { elements, table, identity, group, gates_unitary })
}

/// The stabilizer phases `(1, i^k)` of the qubit copy structure.
pub fn stab_phase_candidates() -> Vec<SemiTensor> {
    let i_pow = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    i_pow
        .iter()
        .map(|&z| SemiTensor::column(Semiring::ComplexDouble, vec![C64::new(1.0, 0.0), z]).expect("two entries"))
        .collect()
}

// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ObservableStructure;
use crate::algebra::{SemiTensor, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Classical,
    Phase,
    General,
}

/// A state tagged with how it relates to a given observable structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub vector: SemiTensor,
    pub kind: PointKind,
}

const MAX_COMPLEX_DIM: usize = 64;
const MAX_BOOLEAN_DIM: usize = 8;
const EIGEN_GAP: f64 = 1e-6;
const EXTRACTION_ATTEMPTS: u64 = 8;
const VERIFY_TOL: f64 = 1e-8;

impl ObservableStructure {
    /// All classical points, extracted once and cached.
    ///
    /// Complex structures: eigenvectors of the Hermitian part of
    /// multiplication by a random element, rescaled so that `ε p = 1`.
    /// Boolean structures: exhaustive search over nonzero subsets.
    pub fn classical_points(&self) -> Result<Vec<SemiTensor>> {
        self.points.get_or_init(|| self.extract_classical_points()).clone()
    }

    pub fn classical_point(&self, index: usize) -> Result<SemiTensor> {
        let pts = self.classical_points()?;
        pts.get(index)
            .cloned()
            .ok_or_else(|| Error::PointsUnavailable(format!("{} has no classical point {index}", self.name())))
    }

    /// Whether `δ p = p ⊗ p` and `ε p = 1` (exactly over the booleans).
    pub fn is_classical_point(&self, p: &SemiTensor, tol: f64) -> bool {
        classical_residual(self, p).is_some_and(|r| if self.semiring().is_boolean() { r == 0.0 } else { r <= tol })
    }

    pub fn classify_point(&self, p: &SemiTensor, tol: f64) -> Point {
        let kind = if self.is_classical_point(p, tol) {
            PointKind::Classical
        } else if super::is_phase_point(self, p, tol) {
            PointKind::Phase
        } else {
            PointKind::General
        };
        Point { vector: p.clone(), kind }
    }

    fn extract_classical_points(&self) -> Result<Vec<SemiTensor>> {
        if self.semiring().is_boolean() {
            extract_boolean(self)
        } else {
            extract_complex(self)
        }
    }
}

fn classical_residual(o: &ObservableStructure, p: &SemiTensor) -> Option<f64> {
    if p.out_dims() != [o.dim()] || !p.in_dims().is_empty() || p.semiring() != o.semiring() {
        return None;
    }
    let copied = o.comult().compose(p).ok()?;
    let pp = p.tensor(p).ok()?;
    let deleted = o.counit().compose(p).ok()?;
    let r1 = copied.max_abs_diff(&pp).ok()?;
    let r2 = (deleted.data()[0] - C64::new(1.0, 0.0)).norm();
    Some(r1.max(r2))
}

fn extract_boolean(o: &ObservableStructure) -> Result<Vec<SemiTensor>> {
    let d = o.dim();
    if d > MAX_BOOLEAN_DIM {
        return Err(Error::PointsUnavailable(format!("boolean dimension {d} exceeds {MAX_BOOLEAN_DIM}")));
    }
    let s = o.semiring();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << d) {
        let p = SemiTensor::from_fn(s, vec![d], vec![], |i, _| if mask & (1 << i[0]) != 0 { s.one() } else { s.zero() });
        if classical_residual(o, &p) == Some(0.0) {
            out.push(p);
        }
    }
    Ok(out)
}

fn extract_complex(o: &ObservableStructure) -> Result<Vec<SemiTensor>> {
    let d = o.dim();
    if d > MAX_COMPLEX_DIM {
        return Err(Error::PointsUnavailable(format!("complex dimension {d} exceeds {MAX_COMPLEX_DIM}")));
    }
    let counit = o.counit();
    let mut last_err = None;
    for attempt in 0..EXTRACTION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
        let a: Vec<C64> = (0..d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let a = SemiTensor::column(o.semiring(), a)?;
        let l = o.left_mult_by(&a)?;
        let h = DMatrix::from_fn(d, d, |r, c| (l.entry(r, c) + l.entry(c, r).conj()) * 0.5);
        let eig = SymmetricEigen::new(h);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        if vals.windows(2).any(|w| w[1] - w[0] < EIGEN_GAP) {
            last_err = Some(Error::Verification("degenerate spectrum for every sampled element".into()));
            continue;
        }
        let mut points = Vec::with_capacity(d);
        let mut failed = None;
        for k in 0..d {
            let v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            let v = SemiTensor::column(o.semiring(), v)?;
            let e = counit.compose(&v)?.data()[0];
            if e.norm() < 1e-9 {
                failed = Some(Error::Verification(format!("eigenvector {k} is deleted by the counit")));
                break;
            }
            let p = v.scale(e.inv());
            match classical_residual(o, &p) {
                Some(r) if r <= VERIFY_TOL => points.push(p),
                Some(r) => {
                    failed = Some(Error::Verification(format!("eigenvector {k} is not copied (residual {r:.3e})")));
                    break;
                }
                None => unreachable!("shapes agree"),
            }
        }
        if let Some(e) = failed {
            // A verification failure is a property of the structure, not of
            // the sample, so retrying would not help.
            return Err(e);
        }
        points.sort_by(compare_points);
        return Ok(points);
    }
    Err(last_err.unwrap_or_else(|| Error::Verification("extraction failed".into())))
}

/// Deterministic order: descending lexicographic on rounded (re, im), which
/// lists computational basis vectors as `|0⟩, |1⟩, …`.
fn compare_points(a: &SemiTensor, b: &SemiTensor) -> Ordering {
    let key = |x: &C64| ((x.re * 1e6).round() as i64, (x.im * 1e6).round() as i64);
    for (x, y) in a.data().iter().zip(b.data()) {
        match key(y).cmp(&key(x)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

// SPDX-License-Identifier: Apache-2.0

//! Small building blocks shared by the verification reports.

use serde::{Serialize, Serializer};

use crate::algebra::{SemiTensor, C64};
use crate::error::Result;

/// One equation checked up to a nonzero scalar (or exactly).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationCheck {
    pub name: String,
    pub holds: bool,
    #[serde(serialize_with = "serialize_opt_c64")]
    pub scalar: Option<C64>,
    pub residual: f64,
}

impl EquationCheck {
    /// `lhs ∝ rhs`, residual measured on max-normalised sides.
    pub fn proportional(name: impl Into<String>, lhs: &SemiTensor, rhs: &SemiTensor, tol: f64) -> Result<Self> {
        let p = SemiTensor::proportionality(lhs, rhs)?;
        let tol = if lhs.semiring().is_boolean() { 0.0 } else { tol };
        Ok(Self { name: name.into(), holds: p.holds(tol), scalar: p.scalar, residual: p.residual })
    }

    /// `lhs = rhs` exactly, residual in max-norm.
    pub fn exact(name: impl Into<String>, lhs: &SemiTensor, rhs: &SemiTensor, tol: f64) -> Result<Self> {
        let r = lhs.max_abs_diff(rhs)?;
        let tol = if lhs.semiring().is_boolean() { 0.0 } else { tol };
        Ok(Self { name: name.into(), holds: r <= tol, scalar: Some(C64::new(1.0, 0.0)), residual: r })
    }

    /// A scalar that must be nonzero.
    pub fn nonzero(name: impl Into<String>, s: C64, tol: f64) -> Self {
        let holds = s.norm() > tol;
        Self { name: name.into(), holds, scalar: Some(s), residual: if holds { 0.0 } else { 1.0 } }
    }

    pub fn failed(name: impl Into<String>) -> Self {
        Self { name: name.into(), holds: false, scalar: None, residual: 1.0 }
    }
}

pub fn serialize_opt_c64<S: Serializer>(x: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.map(|z| [z.re, z.im]).serialize(s)
}

pub fn serialize_c64<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

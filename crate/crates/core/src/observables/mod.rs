// SPDX-License-Identifier: Apache-2.0

//! Observable structures: dagger special commutative Frobenius algebras,
//! their spiders, classical points, phases and measurement statistics.

mod measure;
mod phase;
mod points;
mod spider;

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::{Semiring, SemiTensor, C64};
use crate::error::{Error, Result};

pub use measure::{born_distribution, measurement_distribution, OutcomeDistribution, SUPPORT_THRESHOLD};
pub use phase::{is_phase_point, phase_from_angles, PhaseAngles};
pub(crate) use phase::is_unitary;
pub use points::{Point, PointKind};
pub use spider::{combine_decorations, fuse_check, loop_check, FuseWitness};

/// A multiplication `μ : D ⊗ D → D` and unit `η : I → D`; the comultiplication
/// and counit are their daggers.
#[derive(Clone, Debug)]
pub struct ObservableStructure {
    name: String,
    dim: usize,
    mult: SemiTensor,
    unit: SemiTensor,
    points: Arc<OnceLock<std::result::Result<Vec<SemiTensor>, Error>>>,
}

impl ObservableStructure {
    pub fn new(name: impl Into<String>, mult: SemiTensor, unit: SemiTensor) -> Result<Self> {
        let d = unit.rows();
        if mult.out_dims() != [d] || mult.in_dims() != [d, d] || unit.out_dims() != [d] || !unit.in_dims().is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "multiplication {:?}←{:?} and unit {:?} do not fit one object",
                mult.out_dims(),
                mult.in_dims(),
                unit.out_dims()
            )));
        }
        if mult.semiring() != unit.semiring() {
            return Err(Error::SemiringMismatch(mult.semiring(), unit.semiring()));
        }
        Ok(Self { name: name.into(), dim: d, mult, unit, points: Arc::new(OnceLock::new()) })
    }

    /// The structure copying the computational basis `|0⟩ … |D−1⟩`.
    pub fn copy(semiring: Semiring, dim: usize) -> Self {
        let mult = SemiTensor::from_fn(semiring, vec![dim], vec![dim, dim], |o, i| {
            if o[0] == i[0] && o[0] == i[1] { semiring.one() } else { semiring.zero() }
        });
        let unit = SemiTensor::from_fn(semiring, vec![dim], vec![], |_, _| semiring.one());
        let basis = (0..dim)
            .map(|k| SemiTensor::from_fn(semiring, vec![dim], vec![], |o, _| if o[0] == k { semiring.one() } else { semiring.zero() }))
            .collect();
        let s = Self::new(format!("copy{dim}"), mult, unit).expect("shapes agree");
        s.seed_points(basis);
        s
    }

    /// The complex structure copying a given orthonormal basis.
    pub fn from_orthonormal_basis(name: impl Into<String>, basis: &[Vec<C64>]) -> Result<Self> {
        let d = basis.len();
        if d == 0 || basis.iter().any(|b| b.len() != d) {
            return Err(Error::DimensionMismatch("basis must contain D vectors of length D".into()));
        }
        for (a, u) in basis.iter().enumerate() {
            for (b, v) in basis.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                if (ip - C64::new(expected, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidTensor(format!("basis vectors {a} and {b} are not orthonormal")));
                }
            }
        }
        let c = Semiring::ComplexDouble;
        // μ = Σ_k |b_k⟩⟨b_k|⟨b_k|, η = Σ_k |b_k⟩
        let mult = SemiTensor::from_fn(c, vec![d], vec![d, d], |o, i| {
            basis.iter().map(|b| b[o[0]] * b[i[0]].conj() * b[i[1]].conj()).sum()
        });
        let unit = SemiTensor::from_fn(c, vec![d], vec![], |o, _| basis.iter().map(|b| b[o[0]]).sum());
        let s = Self::new(name, mult, unit)?;
        s.seed_points(
            basis
                .iter()
                .map(|b| SemiTensor::column(c, b.clone()).expect("length checked"))
                .collect(),
        );
        Ok(s)
    }

    /// Installs a known list of classical points, bypassing extraction.
    pub(crate) fn seed_points(&self, points: Vec<SemiTensor>) {
        let _ = self.points.set(Ok(points));
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn semiring(&self) -> Semiring {
        self.mult.semiring()
    }

    pub fn mult(&self) -> &SemiTensor {
        &self.mult
    }

    pub fn unit(&self) -> &SemiTensor {
        &self.unit
    }

    pub fn comult(&self) -> SemiTensor {
        self.mult.dagger()
    }

    pub fn counit(&self) -> SemiTensor {
        self.unit.dagger()
    }

    pub fn identity(&self) -> SemiTensor {
        SemiTensor::identity(self.semiring(), self.dim)
    }

    /// `δ ∘ η : I → D ⊗ D`.
    pub fn cup(&self) -> SemiTensor {
        self.comult().compose(&self.unit).expect("shapes agree")
    }

    /// `ε ∘ μ : D ⊗ D → I`.
    pub fn cap(&self) -> SemiTensor {
        self.counit().compose(&self.mult).expect("shapes agree")
    }

    /// `μ ∘ (1 ⊗ ψ)`, multiplication by a fixed state.
    pub fn left_mult_by(&self, psi: &SemiTensor) -> Result<SemiTensor> {
        self.mult.compose(&self.identity().tensor(psi)?)
    }

    /// `μ ∘ (a ⊗ b)` for two states.
    pub fn multiply_states(&self, a: &SemiTensor, b: &SemiTensor) -> Result<SemiTensor> {
        self.mult.compose(&a.tensor(b)?)
    }

    /// Conjugate of a state with respect to this structure's self-dual
    /// compact structure: `ψ_* = (ψ† ⊗ 1) ∘ cup`.
    pub fn lower_star_state(&self, psi: &SemiTensor) -> Result<SemiTensor> {
        if psi.out_dims() != [self.dim] || !psi.in_dims().is_empty() {
            return Err(Error::DimensionMismatch(format!("expected a state on {}", self.dim)));
        }
        psi.dagger().tensor(&self.identity())?.compose(&self.cup())
    }

    /// Conjugate of an arbitrary map `D^{⊗n} → D^{⊗m}`: entrywise conjugate
    /// transported along the cup matrix `M`, i.e. `M^{⊗m} · f̄ · M̄^{⊗n}`.
    pub fn lower_star(&self, f: &SemiTensor) -> Result<SemiTensor> {
        if f.out_dims().iter().chain(f.in_dims()).any(|&d| d != self.dim) {
            return Err(Error::DimensionMismatch("lower star needs legs of the structure's dimension".into()));
        }
        let s = self.semiring();
        let m = self.cup().reshape(vec![self.dim], vec![self.dim])?;
        let m_bar = m.conj();
        let left = SemiTensor::tensor_all(s, std::iter::repeat_n(&m, f.out_dims().len()))?;
        let right = SemiTensor::tensor_all(s, std::iter::repeat_n(&m_bar, f.in_dims().len()))?;
        let left = left.reshape(f.out_dims().to_vec(), f.out_dims().to_vec())?;
        let right = right.reshape(f.in_dims().to_vec(), f.in_dims().to_vec())?;
        left.compose(&f.conj())?.compose(&right)
    }

    /// Evaluates associativity, commutativity, unit, Frobenius, specialness
    /// and the dagger relation between the monoid and comonoid.
    pub fn check_laws(&self, tol: f64) -> LawReport {
        let id = self.identity();
        let s = self.semiring();
        let d = self.dim;
        let mu = &self.mult;
        let delta = self.comult();
        let tol = if s.is_boolean() { 0.0 } else { tol };
        let mut laws = Vec::new();
        let mut push = |law: &'static str, residual: f64| {
            laws.push(LawCheck { law, holds: residual <= tol, residual });
        };

        let assoc_l = mu.compose(&mu.tensor(&id).unwrap()).unwrap();
        let assoc_r = mu.compose(&id.tensor(mu).unwrap()).unwrap();
        push("associativity", assoc_l.max_abs_diff(&assoc_r).unwrap());

        let swapped = mu.compose(&SemiTensor::swap(s, d, d)).unwrap();
        push("commutativity", swapped.max_abs_diff(mu).unwrap());

        let left_unit = mu.compose(&self.unit.tensor(&id).unwrap()).unwrap();
        let right_unit = mu.compose(&id.tensor(&self.unit).unwrap()).unwrap();
        push("unit", left_unit.max_abs_diff(&id).unwrap().max(right_unit.max_abs_diff(&id).unwrap()));

        let mid = delta.compose(mu).unwrap();
        let frob_l = mu.tensor(&id).unwrap().compose(&id.tensor(&delta).unwrap()).unwrap();
        let frob_r = id.tensor(mu).unwrap().compose(&delta.tensor(&id).unwrap()).unwrap();
        push("frobenius", frob_l.max_abs_diff(&mid).unwrap().max(frob_r.max_abs_diff(&mid).unwrap()));

        push("special", mu.compose(&delta).unwrap().max_abs_diff(&id).unwrap());

        // δ and ε are defined as daggers, so this guards the representation
        // rather than the data: the dagger must be involutive on μ and η.
        let dagger_res = delta.dagger().max_abs_diff(mu).unwrap().max(self.counit().dagger().max_abs_diff(&self.unit).unwrap());
        push("dagger", dagger_res);

        LawReport { structure: self.name.clone(), laws }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawCheck {
    pub law: &'static str,
    pub holds: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub structure: String,
    pub laws: Vec<LawCheck>,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.laws.iter().all(|l| l.holds)
    }

    pub fn get(&self, law: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == law)
    }

    pub fn max_residual(&self) -> f64 {
        self.laws.iter().map(|l| l.residual).fold(0.0, f64::max)
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Pairs of observable structures on one object: coherence,
//! complementarity, strong complementarity and their consequences.

mod group_pair;
mod perturb;

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::{classify_table, contract_network, FiniteAbelianGroup, SemiTensor, C64};
use crate::error::{Error, Result};
use crate::observables::{LawReport, ObservableStructure};
use crate::report::{serialize_c64, EquationCheck};

pub use group_pair::{build_group_pair, fourier_structure};
pub use perturb::{coherent_candidate_z3, noisy_structure, rotated_copy_structure, rotated_gray_pair};

/// Two observable structures on the same object. The white structure acts
/// as the monoid and the gray one as the comonoid in the bialgebra laws.
#[derive(Clone, Debug)]
pub struct ObservablePair {
    white: ObservableStructure,
    gray: ObservableStructure,
    group: Option<FiniteAbelianGroup>,
    antipode: Arc<OnceLock<SemiTensor>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub coherent: bool,
    /// `ε_gray ∘ η_white`, the scalar that rescales gray points into the
    /// white phase group.
    #[serde(serialize_with = "serialize_c64")]
    pub scalar: C64,
    pub equations: Vec<EquationCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub coherent: bool,
    pub complementary: bool,
    pub strongly_complementary: bool,
    pub equations: Vec<EquationCheck>,
}

impl PairReport {
    pub fn get(&self, name: &str) -> Option<&EquationCheck> {
        self.equations.iter().find(|e| e.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.equations.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntipodeReport {
    pub self_adjoint: EquationCheck,
    pub involutive: EquationCheck,
    pub white_endomorphism: EquationCheck,
    pub gray_endomorphism: EquationCheck,
    /// `permutation[i] = j` when `S` maps gray point `i` to gray point `j`.
    pub permutation: Option<Vec<usize>>,
    pub points_self_conjugate: bool,
    pub enough_points: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgroupK {
    pub group: FiniteAbelianGroup,
    /// `table[i][j]` is the index of the scaled gray point `μ_white(k_i ⊗ k_j)`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointHomomorphismReport {
    pub holds: bool,
    pub checks: Vec<EquationCheck>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub coherent: bool,
    pub criterion: EquationCheck,
    pub holds: bool,
    pub strongly_complementary: bool,
    /// The criterion held on a coherent pair that is not strongly
    /// complementary. Never expected; reported rather than asserted.
    pub implication_violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxTwoReport {
    pub first_sc: bool,
    pub second_sc: bool,
    pub grays_complementary: bool,
    pub grays_sc: bool,
    pub grays_complementarity_residual: f64,
    pub grays_bialgebra_residual: f64,
    /// Index of a white classical point both gray units are proportional to.
    pub shared_white_point: Option<usize>,
}

fn net(o: &ObservableStructure, parts: Vec<(SemiTensor, Vec<usize>)>, outs: &[usize], ins: &[usize]) -> Result<SemiTensor> {
    contract_network(o.semiring(), parts, outs, ins)
}

impl ObservablePair {
    pub fn new(white: ObservableStructure, gray: ObservableStructure) -> Result<Self> {
        if white.dim() != gray.dim() {
            return Err(Error::DimensionMismatch(format!("white has dimension {}, gray {}", white.dim(), gray.dim())));
        }
        if white.semiring() != gray.semiring() {
            return Err(Error::SemiringMismatch(white.semiring(), gray.semiring()));
        }
        Ok(Self { white, gray, group: None, antipode: Arc::new(OnceLock::new()) })
    }

    pub(crate) fn with_group(mut self, g: FiniteAbelianGroup) -> Self {
        self.group = Some(g);
        self
    }

    pub fn white(&self) -> &ObservableStructure {
        &self.white
    }

    pub fn gray(&self) -> &ObservableStructure {
        &self.gray
    }

    pub fn dim(&self) -> usize {
        self.white.dim()
    }

    /// The group the pair was built from, if any.
    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        self.group.as_ref()
    }

    /// The pair with colours exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.gray.clone(), self.white.clone()).expect("same object")
    }

    pub fn check_laws(&self, tol: f64) -> (LawReport, LawReport) {
        (self.white.check_laws(tol), self.gray.check_laws(tol))
    }

    /// `ε_gray ∘ η_white`.
    pub fn unit_scalar(&self) -> C64 {
        self.gray.counit().compose(self.white.unit()).expect("same object").data()[0]
    }

    pub fn check_coherence(&self, tol: f64) -> Result<CoherenceReport> {
        let (w, g) = (&self.white, &self.gray);
        let eq1 = EquationCheck::proportional(
            "gray copies white unit",
            &g.comult().compose(w.unit())?,
            &w.unit().tensor(w.unit())?,
            tol,
        )?;
        let eq2 = EquationCheck::proportional(
            "white copies gray unit",
            &w.comult().compose(g.unit())?,
            &g.unit().tensor(g.unit())?,
            tol,
        )?;
        let scalar = self.unit_scalar();
        let eq3 = EquationCheck::nonzero("unit scalar nonzero", scalar, tol);
        Ok(CoherenceReport { coherent: eq1.holds && eq2.holds && eq3.holds, scalar, equations: vec![eq1, eq2, eq3] })
    }

    /// `S = (cap_white ⊗ 1) ∘ (1 ⊗ cup_gray)`.
    pub fn antipode(&self) -> SemiTensor {
        self.antipode
            .get_or_init(|| {
                net(&self.white, vec![(self.white.cap(), vec![0, 1]), (self.gray.cup(), vec![1, 2])], &[2], &[0])
                    .expect("antipode wiring")
            })
            .clone()
    }

    /// The Hopf law `μ_gray ∘ (1 ⊗ S) ∘ δ_white ∝ η_gray ∘ ε_white`.
    pub fn check_complementarity(&self, tol: f64) -> Result<EquationCheck> {
        let s = self.antipode();
        let (w, g) = (&self.white, &self.gray);
        // δ_w(0) = (1, 2), S(2) = 3, μ_g(1, 3) = 4
        let lhs = net(w, vec![(w.comult(), vec![1, 2, 0]), (s, vec![3, 2]), (g.mult().clone(), vec![4, 1, 3])], &[4], &[0])?;
        let rhs = g.unit().compose(&w.counit())?;
        EquationCheck::proportional("hopf law", &lhs, &rhs, tol)
    }

    pub fn check_strong_complementarity(&self, tol: f64) -> Result<PairReport> {
        let (w, g) = (&self.white, &self.gray);
        let coherence = self.check_coherence(tol)?;
        let mut equations = coherence.equations.clone();

        let lhs = g.comult().compose(w.mult())?;
        // δ_g(a) = (a1, a2), δ_g(b) = (b1, b2), μ_w(a1, b1) = c1, μ_w(a2, b2) = c2
        let rhs = net(
            w,
            vec![
                (g.comult(), vec![2, 3, 0]),
                (g.comult(), vec![4, 5, 1]),
                (w.mult().clone(), vec![6, 2, 4]),
                (w.mult().clone(), vec![7, 3, 5]),
            ],
            &[6, 7],
            &[0, 1],
        )?;
        equations.push(EquationCheck::proportional("bialgebra", &lhs, &rhs, tol)?);
        equations.push(EquationCheck::proportional(
            "gray counit deletes white product",
            &g.counit().compose(w.mult())?,
            &g.counit().tensor(&g.counit())?,
            tol,
        )?);
        let strongly_complementary = equations.iter().all(|e| e.holds);
        let hopf = self.check_complementarity(tol)?;
        let complementary = hopf.holds;
        equations.push(hopf);
        Ok(PairReport { coherent: coherence.coherent, complementary, strongly_complementary, equations })
    }

    pub fn antipode_report(&self, tol: f64) -> Result<AntipodeReport> {
        let s = self.antipode();
        let sr = s.semiring();
        let d = self.dim();
        let self_adjoint = EquationCheck::exact("antipode self-adjoint", &s.dagger(), &s, tol)?;
        let involutive = EquationCheck::exact("antipode involutive", &s.compose(&s)?, &SemiTensor::identity(sr, d), tol)?;
        let white_endomorphism = endomorphism_check("white", &self.white, &s, tol)?;
        let gray_endomorphism = endomorphism_check("gray", &self.gray, &s, tol)?;

        let permutation = self.gray.classical_points().ok().and_then(|pts| {
            pts.iter()
                .map(|p| {
                    let image = s.compose(p).ok()?;
                    let tol = if sr.is_boolean() { 0.0 } else { tol };
                    pts.iter().position(|q| image.max_abs_diff(q).is_ok_and(|r| r <= tol))
                })
                .collect::<Option<Vec<usize>>>()
        });

        let self_conj = |o: &ObservableStructure| -> bool {
            o.classical_points().is_ok_and(|pts| {
                pts.iter().all(|p| o.lower_star_state(p).and_then(|q| q.max_abs_diff(p)).is_ok_and(|r| r <= tol))
            })
        };
        let enough = |o: &ObservableStructure| o.classical_points().is_ok_and(|pts| pts.len() == d);
        Ok(AntipodeReport {
            self_adjoint,
            involutive,
            white_endomorphism,
            gray_endomorphism,
            permutation,
            points_self_conjugate: self_conj(&self.white) && self_conj(&self.gray),
            enough_points: enough(&self.white) && enough(&self.gray),
        })
    }

    /// Gray classical points scaled by `ε_gray ∘ η_white`, closed under the
    /// white multiplication, and the isomorphism type of the resulting group.
    pub fn extract_subgroup_k(&self, tol: f64) -> Result<SubgroupK> {
        let c = self.unit_scalar();
        if c.norm() <= tol {
            return Err(Error::Closure("gray counit deletes the white unit".into()));
        }
        let scaled: Vec<SemiTensor> = self.gray.classical_points()?.iter().map(|p| p.scale(c)).collect();
        let n = scaled.len();
        let boolean = self.white.semiring().is_boolean();
        let mut table = vec![vec![0usize; n]; n];
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let prod = self.white.multiply_states(&scaled[i], &scaled[j])?;
                let k = match_point(&prod, &scaled, boolean).ok_or_else(|| {
                    Error::Closure(format!("product of points {i} and {j} is not a scaled gray point"))
                })?;
                residual = residual.max(prod.max_abs_diff(&scaled[k])?);
                table[i][j] = k;
            }
        }
        let group = classify_table(&table).map_err(|e| Error::Closure(e.to_string()))?;
        let identity = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a)).expect("classified tables have an identity");
        Ok(SubgroupK { group, table, identity, residual })
    }

    /// White `(1, k)` spider into gray `(k, 1)` spider, compared with
    /// `η_gray ∘ ε_white`.
    pub fn check_order_hopf(&self, k: usize, tol: f64) -> Result<EquationCheck> {
        if k == 0 {
            return Err(Error::ArityMismatch("k must be at least 1".into()));
        }
        // μ_g^(k) ∘ δ_w^(k) = μ_g ∘ (1 ⊗ [μ_g^(k-1) ∘ δ_w^(k-1)]) ∘ δ_w, which
        // keeps every intermediate at D×D×D instead of D^(k+1).
        let d = self.dim();
        let one = SemiTensor::identity(self.white.semiring(), d);
        let mut lhs = one.clone();
        for _ in 1..k {
            lhs = self.gray.mult().compose(&one.tensor(&lhs)?)?.compose(&self.white.comult())?;
        }
        let rhs = self.gray.unit().compose(&self.white.counit())?;
        EquationCheck::proportional(format!("order-{k} hopf"), &lhs, &rhs, tol)
    }

    /// For every gray classical point `p`, whether `μ_white ∘ (1 ⊗ p)` is a
    /// gray comonoid homomorphism up to scalar.
    pub fn check_point_homomorphism(&self, tol: f64) -> PointHomomorphismReport {
        let run = || -> Result<Vec<EquationCheck>> {
            let g = &self.gray;
            let mut checks = Vec::new();
            for (i, p) in g.classical_points()?.iter().enumerate() {
                let f = self.white.left_mult_by(p)?;
                checks.push(EquationCheck::proportional(
                    format!("point {i} preserves comultiplication"),
                    &g.comult().compose(&f)?,
                    &f.tensor(&f)?.compose(&g.comult())?,
                    tol,
                )?);
                checks.push(EquationCheck::proportional(
                    format!("point {i} preserves counit"),
                    &g.counit().compose(&f)?,
                    &g.counit(),
                    tol,
                )?);
            }
            Ok(checks)
        };
        match run() {
            Ok(checks) => PointHomomorphismReport { holds: checks.iter().all(|c| c.holds), checks, error: None },
            Err(e) => PointHomomorphismReport { holds: false, checks: vec![], error: Some(e.to_string()) },
        }
    }

    /// Decoherence after combining two decohered systems through the white
    /// multiplication changes nothing:
    /// `Δ ∘ M ∘ (Δ ⊗ Δ) ∝ M ∘ (Δ ⊗ Δ)` with `Δ = δ_gray ∘ μ_gray` on a
    /// system and its conjugate and `M = (μ_white ⊗ (μ_white)_*) ∘ (1 ⊗ σ ⊗ 1)`.
    pub fn check_sharpness_criterion(&self, tol: f64) -> Result<SharpnessReport> {
        let (w, g) = (&self.white, &self.gray);
        let deco = g.comult().compose(g.mult())?;
        let w_conj = g.lower_star(w.mult())?;
        // inputs x1 x1' x2 x2' = 0 1 2 3; decohered a1 a1' a2 a2' = 4 5 6 7;
        // combined c c' = 8 9; decohered again e e' = 10 11
        let base = vec![
            (deco.clone(), vec![4, 5, 0, 1]),
            (deco.clone(), vec![6, 7, 2, 3]),
            (w.mult().clone(), vec![8, 4, 6]),
            (w_conj, vec![9, 5, 7]),
        ];
        let rhs = net(w, base.clone(), &[8, 9], &[0, 1, 2, 3])?;
        let mut with_final = base;
        with_final.push((deco, vec![10, 11, 8, 9]));
        let lhs = net(w, with_final, &[10, 11], &[0, 1, 2, 3])?;
        let criterion = EquationCheck::proportional("sharpness", &lhs, &rhs, tol)?;
        let coherent = self.check_coherence(tol)?.coherent;
        let holds = coherent && criterion.holds;
        let strongly_complementary = self.check_strong_complementarity(tol)?.strongly_complementary;
        Ok(SharpnessReport {
            coherent,
            criterion,
            holds,
            strongly_complementary,
            implication_violated: holds && !strongly_complementary,
        })
    }
}

fn endomorphism_check(colour: &str, o: &ObservableStructure, s: &SemiTensor, tol: f64) -> Result<EquationCheck> {
    let ss = s.tensor(s)?;
    let r_mult = s.compose(o.mult())?.max_abs_diff(&o.mult().compose(&ss)?)?;
    let r_unit = s.compose(o.unit())?.max_abs_diff(o.unit())?;
    let r_comult = o.comult().compose(s)?.max_abs_diff(&ss.compose(&o.comult())?)?;
    let r_counit = o.counit().compose(s)?.max_abs_diff(&o.counit())?;
    let residual = r_mult.max(r_unit).max(r_comult).max(r_counit);
    let tol = if s.semiring().is_boolean() { 0.0 } else { tol };
    Ok(EquationCheck {
        name: format!("antipode is a {colour} Frobenius endomorphism"),
        holds: residual <= tol,
        scalar: Some(C64::new(1.0, 0.0)),
        residual,
    })
}

/// Index of the unique candidate whose normalised overlap with `v` is at
/// least `1 − 1e-6` (exact equality over the booleans).
fn match_point(v: &SemiTensor, candidates: &[SemiTensor], boolean: bool) -> Option<usize> {
    if boolean {
        let hits: Vec<usize> = (0..candidates.len()).filter(|&k| candidates[k] == *v).collect();
        return (hits.len() == 1).then(|| hits[0]);
    }
    let nv = v.norm();
    if nv == 0.0 {
        return None;
    }
    let hits: Vec<usize> = (0..candidates.len())
        .filter(|&k| {
            let c = &candidates[k];
            let ip: C64 = c.data().iter().zip(v.data()).map(|(a, b)| a.conj() * b).sum();
            ip.norm() / (c.norm() * nv) >= 1.0 - 1e-6
        })
        .collect();
    (hits.len() == 1).then(|| hits[0])
}

/// Evidence for "at most two mutually strongly complementary observables":
/// with `(white, gray1)` and `(white, gray2)` both strongly complementary,
/// the grays are not, and both gray units sit on one white classical point.
pub fn max_two_check(
    white: &ObservableStructure,
    gray1: &ObservableStructure,
    gray2: &ObservableStructure,
    tol: f64,
) -> Result<MaxTwoReport> {
    let p1 = ObservablePair::new(white.clone(), gray1.clone())?;
    let p2 = ObservablePair::new(white.clone(), gray2.clone())?;
    let grays = ObservablePair::new(gray1.clone(), gray2.clone())?;
    let r1 = p1.check_strong_complementarity(tol)?;
    let r2 = p2.check_strong_complementarity(tol)?;
    let rg = grays.check_strong_complementarity(tol)?;
    let hopf = rg.get("hopf law").expect("hopf law is always reported");
    let bialgebra = rg.get("bialgebra").expect("bialgebra is always reported");
    let shared_white_point = white.classical_points().ok().and_then(|pts| {
        pts.iter().position(|p| {
            [gray1.unit(), gray2.unit()]
                .iter()
                .all(|u| SemiTensor::proportionality(u, p).is_ok_and(|q| q.holds(tol)))
        })
    });
    Ok(MaxTwoReport {
        first_sc: r1.strongly_complementary,
        second_sc: r2.strongly_complementary,
        grays_complementary: rg.complementary,
        grays_sc: rg.strongly_complementary,
        grays_complementarity_residual: hopf.residual,
        grays_bialgebra_residual: bialgebra.residual,
        shared_white_point,
    })
}

#[cfg(test)]
mod tests;

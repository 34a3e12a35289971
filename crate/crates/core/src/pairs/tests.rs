// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use super::*;
use crate::algebra::Semiring;

const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn grp(s: &str) -> FiniteAbelianGroup {
    s.parse().unwrap()
}

fn all_groups_up_to_8() -> Vec<FiniteAbelianGroup> {
    ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z7", "Z8", "Z2xZ4", "Z2xZ2xZ2"].iter().map(|s| grp(s)).collect()
}

/// Permutation matrix `|g⟩ ↦ |−g⟩`, built directly from the group tables.
fn inverse_permutation(g: &FiniteAbelianGroup) -> SemiTensor {
    let d = g.order();
    SemiTensor::from_fn(Semiring::ComplexDouble, vec![d], vec![d], |o, i| {
        if g.neg_index(i[0]) == o[0] { c(1.0, 0.0) } else { c(0.0, 0.0) }
    })
}

fn y_basis_structure() -> ObservableStructure {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ObservableStructure::from_orthonormal_basis("y", &[vec![c(r, 0.0), c(0.0, r)], vec![c(r, 0.0), c(0.0, -r)]]).unwrap()
}

#[test]
fn z2_pair_is_coherent_with_root_two_scalar() {
    let p = build_group_pair(&grp("Z2"));
    let r = p.check_coherence(TOL).unwrap();
    assert!(r.coherent);
    assert!((r.scalar - c(2f64.sqrt(), 0.0)).norm() < 1e-12);
}

#[test]
fn self_pair_is_not_coherent() {
    let z = ObservableStructure::copy(Semiring::ComplexDouble, 2);
    let p = ObservablePair::new(z.clone(), z).unwrap();
    assert!(!p.check_coherence(TOL).unwrap().coherent);
    assert!(!p.check_complementarity(TOL).unwrap().holds);
}

#[test]
fn antipode_is_group_inverse() {
    for name in ["Z2", "Z3", "Z4", "Z2xZ2", "Z6"] {
        let g = grp(name);
        let s = build_group_pair(&g).antipode();
        assert!(s.max_abs_diff(&inverse_permutation(&g)).unwrap() < 1e-12, "{name}");
    }
    let z2 = build_group_pair(&grp("Z2")).antipode();
    assert!(z2.max_abs_diff(&SemiTensor::identity(Semiring::ComplexDouble, 2)).unwrap() < 1e-12);
    let z4 = build_group_pair(&grp("Z4")).antipode();
    let id = SemiTensor::identity(Semiring::ComplexDouble, 4);
    assert!(z4.compose(&z4).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
    assert!(z4.max_abs_diff(&id).unwrap() > 0.5);
}

#[test]
fn antipode_report_on_group_pairs() {
    for g in all_groups_up_to_8() {
        let r = build_group_pair(&g).antipode_report(TOL).unwrap();
        assert!(r.self_adjoint.holds && r.involutive.holds, "{g}");
        assert!(r.white_endomorphism.holds && r.gray_endomorphism.holds, "{g}");
        assert!(r.enough_points, "{g}");
        let perm = r.permutation.unwrap();
        assert_eq!(perm, (0..g.order()).map(|i| g.neg_index(i)).collect::<Vec<_>>(), "{g}");
    }
}

#[test]
fn z_and_y_are_complementary() {
    let z = ObservableStructure::copy(Semiring::ComplexDouble, 2);
    let p = ObservablePair::new(z, y_basis_structure()).unwrap();
    assert!(p.check_complementarity(TOL).unwrap().holds);
}

#[test]
fn group_pairs_are_strongly_complementary() {
    for g in all_groups_up_to_8() {
        let r = build_group_pair(&g).check_strong_complementarity(TOL).unwrap();
        assert!(r.coherent && r.complementary && r.strongly_complementary, "{g}");
        assert!(r.max_residual() < 1e-10, "{g}: {}", r.max_residual());
    }
}

#[test]
fn group_pair_structures_obey_their_laws() {
    for g in all_groups_up_to_8() {
        let (w, gr) = build_group_pair(&g).check_laws(TOL);
        assert!(w.all_hold() && gr.all_hold(), "{g}");
    }
}

#[test]
fn inequivalent_fourier_structures_are_not_strongly_complementary() {
    let a = fourier_structure(&grp("Z4")).unwrap();
    let b = fourier_structure(&grp("Z2xZ2")).unwrap();
    let r = ObservablePair::new(a, b).unwrap().check_strong_complementarity(TOL).unwrap();
    assert!(!r.strongly_complementary);
    assert!(r.max_residual() > 1e-3);
}

#[test]
fn fourier_structure_is_the_white_structure() {
    for g in all_groups_up_to_8() {
        let f = fourier_structure(&g).unwrap();
        let w = build_group_pair(&g).white().clone();
        assert!(f.mult().max_abs_diff(w.mult()).unwrap() < 1e-12, "{g}");
        assert!(f.unit().max_abs_diff(w.unit()).unwrap() < 1e-12, "{g}");
    }
}

#[test]
fn white_points_are_scaled_characters() {
    let p = build_group_pair(&grp("Z2"));
    let pts = p.white().classical_points().unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!(pts[0].max_abs_diff(&SemiTensor::column(Semiring::ComplexDouble, vec![c(r, 0.0), c(r, 0.0)]).unwrap()).unwrap() < 1e-12);
    assert!(pts[1].max_abs_diff(&SemiTensor::column(Semiring::ComplexDouble, vec![c(r, 0.0), c(-r, 0.0)]).unwrap()).unwrap() < 1e-12);
}

#[test]
fn subgroup_k_matches_group() {
    for g in all_groups_up_to_8() {
        let k = build_group_pair(&g).extract_subgroup_k(TOL).unwrap();
        assert!(k.group.is_isomorphic(&g), "{g} vs {}", k.group);
        assert!(k.residual < 1e-10);
    }
    let k = build_group_pair(&grp("Z4")).extract_subgroup_k(TOL).unwrap();
    assert_eq!(k.group.exponent(), 4);
}

#[test]
fn order_hopf_examples() {
    let z2 = build_group_pair(&grp("Z2"));
    assert!(z2.check_order_hopf(2, TOL).unwrap().holds);
    assert!(!z2.check_order_hopf(1, TOL).unwrap().holds);
    assert!(build_group_pair(&grp("Z3")).check_order_hopf(3, TOL).unwrap().holds);
    assert!(z2.check_order_hopf(0, TOL).is_err());
}

#[test]
fn order_hopf_at_exponent_of_k() {
    for g in all_groups_up_to_8() {
        let p = build_group_pair(&g);
        let e = p.extract_subgroup_k(TOL).unwrap().group.exponent() as usize;
        assert!(p.check_order_hopf(e, TOL).unwrap().holds, "{g}");
    }
}

#[test]
fn point_homomorphism_examples() {
    let z2 = build_group_pair(&grp("Z2"));
    let r = z2.check_point_homomorphism(TOL);
    assert!(r.holds);
    assert_eq!(r.checks.len(), 4);

    let noisy = noisy_structure(z2.gray(), 0.1, 7).unwrap();
    let broken = ObservablePair::new(z2.white().clone(), noisy).unwrap();
    assert!(!broken.check_point_homomorphism(TOL).holds);

    assert!(build_group_pair(&FiniteAbelianGroup::trivial()).check_point_homomorphism(TOL).holds);
}

#[test]
fn trivial_group_pair_is_scalar_and_sc() {
    let p = build_group_pair(&FiniteAbelianGroup::trivial());
    assert_eq!(p.dim(), 1);
    assert!(p.check_strong_complementarity(TOL).unwrap().strongly_complementary);
}

#[test]
fn coherent_candidate_is_coherent_only() {
    let p = coherent_candidate_z3(1.0).unwrap();
    let r = p.check_strong_complementarity(TOL).unwrap();
    assert!(r.coherent);
    assert!(!r.complementary);
    assert!(!r.strongly_complementary);
}

#[test]
fn sharpness_examples() {
    for g in all_groups_up_to_8() {
        let r = build_group_pair(&g).check_sharpness_criterion(TOL).unwrap();
        assert!(r.holds && r.strongly_complementary, "{g}: {}", r.criterion.residual);
        assert!(r.criterion.residual < 1e-10);
    }
    let z = ObservableStructure::copy(Semiring::ComplexDouble, 2);
    let self_pair = ObservablePair::new(z.clone(), z).unwrap();
    assert!(!self_pair.check_sharpness_criterion(TOL).unwrap().holds);

    let perturbed = rotated_gray_pair(&grp("Z2"), 0.1, 3).unwrap();
    let r = perturbed.check_sharpness_criterion(TOL).unwrap();
    assert!(!r.holds && !r.strongly_complementary);

    let r = coherent_candidate_z3(1.0).unwrap().check_sharpness_criterion(TOL).unwrap();
    assert!(r.coherent);
    assert!(r.criterion.residual > 0.1, "{}", r.criterion.residual);
    assert!(!r.implication_violated);
}

#[test]
fn max_two_examples() {
    let copy4 = ObservableStructure::copy(Semiring::ComplexDouble, 4);
    let f1 = fourier_structure(&grp("Z4")).unwrap();
    let f2 = fourier_structure(&grp("Z2xZ2")).unwrap();
    let r = max_two_check(&copy4, &f1, &f2, TOL).unwrap();
    assert!(r.first_sc && r.second_sc);
    assert!(!r.grays_sc);
    assert_eq!(r.shared_white_point, Some(0));

    let z2 = build_group_pair(&grp("Z2"));
    let r = max_two_check(z2.white(), z2.gray(), z2.gray(), TOL).unwrap();
    assert!(!r.grays_complementary && !r.grays_sc);

    let z1 = build_group_pair(&FiniteAbelianGroup::trivial());
    let r = max_two_check(z1.white(), z1.gray(), z1.gray(), TOL).unwrap();
    assert!(r.first_sc && r.second_sc && r.grays_sc);
}

#[test]
fn frel_style_boolean_self_pair_fails() {
    let z = ObservableStructure::copy(Semiring::Boolean, 2);
    let p = ObservablePair::new(z.clone(), z).unwrap();
    assert!(!p.check_coherence(TOL).unwrap().coherent);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let a = ObservableStructure::copy(Semiring::ComplexDouble, 2);
    let b = ObservableStructure::copy(Semiring::ComplexDouble, 3);
    assert!(matches!(ObservablePair::new(a, b), Err(Error::DimensionMismatch(_))));
}

fn group_strategy() -> impl Strategy<Value = FiniteAbelianGroup> {
    proptest::sample::select(all_groups_up_to_8())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn sc_implies_complementary_on_perturbations(g in group_strategy(), eps in 0.01f64..0.3, seed in any::<u64>()) {
        prop_assume!(g.order() >= 2);
        let p = rotated_gray_pair(&g, eps, seed).unwrap();
        let r = p.check_strong_complementarity(TOL).unwrap();
        prop_assert!(!r.strongly_complementary || r.complementary);
        prop_assert!(!r.strongly_complementary);
    }

    #[test]
    fn point_homomorphism_iff_sc(g in group_strategy(), eps in 0.0f64..0.3, seed in any::<u64>()) {
        let p = if eps < 0.02 { build_group_pair(&g) } else { rotated_gray_pair(&g, eps, seed).unwrap() };
        let sc = p.check_strong_complementarity(TOL).unwrap().strongly_complementary;
        prop_assert_eq!(p.check_point_homomorphism(TOL).holds, sc);
    }

    #[test]
    fn swapped_group_pair_stays_sc(g in group_strategy()) {
        let r = build_group_pair(&g).swapped().check_strong_complementarity(TOL).unwrap();
        prop_assert!(r.strongly_complementary);
    }
}

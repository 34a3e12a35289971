// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{FiniteAbelianGroup, SemiTensor, C64};
use crate::error::Error;
use crate::observables::PhaseAngles;
use crate::pairs::build_group_pair;

const TOL: f64 = 1e-9;

fn group(s: &str) -> FiniteAbelianGroup {
    s.parse().unwrap()
}

fn classic() -> MerminScenario {
    MerminScenario::from_json(
        r#"{"group":"Z2","parties":3,"measurements":{"X":[0,0],"Y":[0,"1/4"]},
            "control":["X","X","X"],"variations":[["X","Y","Y"],["Y","X","Y"],["Y","Y","X"]]}"#,
    )
    .unwrap()
}

fn names(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

fn group_sum(g: &FiniteAbelianGroup, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| g.add_index(acc, x))
}

/// Coefficients of a state on the white classical points, one leg at a time.
fn in_white_basis(pair: &ObservablePair, state: &SemiTensor) -> SemiTensor {
    let pts = pair.white().classical_points().unwrap();
    let d = pair.dim();
    let rows: Vec<C64> = pts.iter().flat_map(|p| p.data().iter().map(|x| x.conj()).collect::<Vec<_>>()).collect();
    let change = SemiTensor::new(state.semiring(), vec![d], vec![d], rows).unwrap();
    let mut t = state.clone();
    for leg in 0..state.out_dims().len() {
        t = t.apply_to_output(leg, &change).unwrap();
    }
    t
}

#[test]
fn ghz_is_diagonal_on_white_points() {
    let pair = build_group_pair(&group("Z2"));
    let ghz = ghz_state(&pair, 3).unwrap();
    let w = in_white_basis(&pair, &ghz);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, x) in w.data().iter().enumerate() {
        let want = if i == 0 || i == 7 { h } else { 0.0 };
        assert!((x - C64::new(want, 0.0)).norm() < 1e-12, "entry {i}: {x}");
    }
    // On the group basis the same state is the even-parity superposition.
    for (i, x) in ghz.data().iter().enumerate() {
        let want = if (i as u32).count_ones().is_multiple_of(2) { 0.5 } else { 0.0 };
        assert!((x - C64::new(want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn ghz_two_parties_on_z3_is_bell_type() {
    let pair = build_group_pair(&group("Z3"));
    let w = in_white_basis(&pair, &ghz_state(&pair, 2).unwrap());
    let c = 1.0 / 3f64.sqrt();
    for a in 0..3 {
        for b in 0..3 {
            let want = if a == b { c } else { 0.0 };
            assert!((w.data()[a * 3 + b] - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn single_party_ghz_is_the_white_unit() {
    for g in ["Z2", "Z3", "Z2xZ2"] {
        let pair = build_group_pair(&group(g));
        let ghz = ghz_state(&pair, 1).unwrap();
        assert!(SemiTensor::equal_up_to_scalar(&ghz, pair.white().unit(), 1e-12).unwrap().is_some());
        assert!((ghz.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn classic_settings_have_parity_supports() {
    let pair = build_group_pair(&group("Z2"));
    let s = classic();
    let xxx = setting_distribution_bruteforce(&pair, &s, &names(&["X", "X", "X"])).unwrap();
    let even: Vec<Vec<usize>> = vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
    assert_eq!(xxx.support(), even);
    for t in &even {
        assert!((xxx.get(t) - 0.25).abs() < 1e-12);
    }
    for v in &s.variations {
        let d = setting_distribution_bruteforce(&pair, &s, v).unwrap();
        let odd: Vec<Vec<usize>> = d.support();
        assert_eq!(odd.len(), 4);
        for t in &odd {
            assert_eq!(t.iter().sum::<usize>() % 2, 1);
            assert!((d.get(t) - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn single_party_outcome_is_the_summed_class() {
    // A lone party holds the white unit: with no phase the outcome is 0.
    let pair = build_group_pair(&group("Z3"));
    let mut s = MerminScenario {
        group: group("Z3"),
        parties: 1,
        measurements: BTreeMap::from([("X".to_string(), PhaseAngles::zero(3))]),
        control: names(&["X"]),
        variations: vec![],
    };
    let d = setting_distribution_bruteforce(&pair, &s, &names(&["X"])).unwrap();
    assert!((d.probabilities[0] - 1.0).abs() < 1e-12);
    s.measurements.insert("T".into(), PhaseAngles::parse(&["0", "1/3", "2/3"]).unwrap());
    let d = setting_distribution_bruteforce(&pair, &s, &names(&["T"])).unwrap();
    assert_eq!(d.support(), vec![vec![2]]);
}

#[test]
fn single_party_marginals_are_uniform() {
    let pair = build_group_pair(&group("Z3"));
    let s = MerminScenario {
        group: group("Z3"),
        parties: 3,
        measurements: BTreeMap::from([("T".to_string(), PhaseAngles::parse(&["0", "1/7", "2/5"]).unwrap())]),
        control: names(&["T", "T", "T"]),
        variations: vec![],
    };
    let d = setting_distribution_bruteforce(&pair, &s, &s.control).unwrap();
    for k in 0..3 {
        for x in 0..3 {
            let m: f64 = (0..27).map(|i| d.tuple(i)).filter(|t| t[k] == x).map(|t| d.get(&t)).sum();
            assert!((m - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}

fn random_scenario(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup, n: usize) -> MerminScenario {
    let d = g.order();
    let mut measurements = BTreeMap::new();
    for name in ["A", "B", "C"] {
        let turns = (0..d)
            .map(|j| if j == 0 { 0.into() } else { num_rational::Rational64::new(rng.random_range(0..24), 24) })
            .collect();
        measurements.insert(name.to_string(), PhaseAngles::new(turns).unwrap());
    }
    let pick = |rng: &mut ChaCha8Rng| ["A", "B", "C"][rng.random_range(0..3)].to_string();
    let control = (0..n).map(|_| pick(rng)).collect();
    MerminScenario { group: g.clone(), parties: n, measurements, control, variations: vec![] }
}

#[test]
fn closed_form_matches_full_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in ["Z2", "Z3", "Z2xZ2"] {
        let g = group(g);
        let pair = build_group_pair(&g);
        for _ in 0..12 {
            let n = rng.random_range(1..=4);
            let s = random_scenario(&mut rng, &g, n);
            let a = setting_distribution_analytic(&pair, &s, &s.control).unwrap();
            let b = setting_distribution_bruteforce(&pair, &s, &s.control).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < TOL);
            assert!((a.total() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn white_point_decoration_gives_uniform_outcomes() {
    let pair = build_group_pair(&group("Z3"));
    for p in pair.white().classical_points().unwrap() {
        let d = ghz_point_distribution(&pair, 3, &p).unwrap();
        assert!(d.probabilities.iter().all(|&x| (x - 1.0 / 27.0).abs() < 1e-12));
        assert_eq!(classify_decoration(&pair, &p, TOL).unwrap(), CorrelationClass::Uncorrelated);
    }
}

#[test]
fn correlation_class_examples() {
    let pair = build_group_pair(&group("Z2"));
    let class = |a: &[&str]| correlation_class(&pair, &PhaseAngles::parse(a).unwrap(), TOL).unwrap();
    assert_eq!(class(&["0", "0"]), CorrelationClass::ParityCorrelated(0));
    assert_eq!(class(&["0", "1/2"]), CorrelationClass::ParityCorrelated(1));
    assert_eq!(class(&["0", "1/4"]), CorrelationClass::Other);
}

#[test]
fn zero_phase_sum_correlates_at_identity() {
    for g in ["Z2", "Z3", "Z4", "Z2xZ2"] {
        let g = group(g);
        let pair = build_group_pair(&g);
        let d = g.order();
        let s = MerminScenario {
            group: g.clone(),
            parties: 3,
            measurements: BTreeMap::from([("X".to_string(), PhaseAngles::zero(d))]),
            control: names(&["X", "X", "X"]),
            variations: vec![],
        };
        let dist = setting_distribution_analytic(&pair, &s, &s.control).unwrap();
        assert!(dist.support().iter().all(|t| group_sum(&g, t) == 0));
    }
}

#[test]
fn conditions_on_the_classic_scenario() {
    let pair = build_group_pair(&group("Z2"));
    let c = check_scenario_conditions(&classic(), &pair, TOL).unwrap();
    assert_eq!(c.exponent, 2);
    assert!(c.multiplicities_divisible && c.settings_parity_correlated);
    assert_eq!((c.control_point, c.variations_point), (Some(0), Some(1)));
    assert!(c.points_distinct && c.passes);
    let y0 = c.multiplicities.iter().find(|m| m.party == 0 && m.measurement == "Y").unwrap();
    assert_eq!((y0.in_variations, y0.in_control), (2, false));
    let x0 = c.multiplicities.iter().find(|m| m.party == 0 && m.measurement == "X").unwrap();
    assert_eq!((x0.in_variations, x0.in_control), (1, true));
}

#[test]
fn two_variations_break_multiplicity() {
    let pair = build_group_pair(&group("Z2"));
    let mut s = classic();
    s.variations.pop();
    let c = check_scenario_conditions(&s, &pair, TOL).unwrap();
    assert!(!c.multiplicities_divisible && !c.passes);
    let supports = scenario_supports(&pair, &s).unwrap();
    let r = lhv_search(&s, &supports, LhvOptions::default()).unwrap();
    assert!(r.is_feasible());
    assert!(witness_is_consistent(&s, &supports, r.witness.as_ref().unwrap()));
}

#[test]
fn parity_functional_examples() {
    let pair = build_group_pair(&group("Z2"));
    let s = classic();
    let supports = scenario_supports(&pair, &s).unwrap();
    let settings: Vec<Vec<String>> = s.settings().iter().map(|x| x.to_vec()).collect();
    // All 4^4 choices of one supported tuple per setting.
    for choice in 0..256usize {
        let outcomes: BTreeMap<Vec<String>, Vec<usize>> = settings
            .iter()
            .enumerate()
            .map(|(i, st)| (st.clone(), supports[i][(choice >> (2 * i)) & 3].clone()))
            .collect();
        let (c, v) = parity_functional(&s, &outcomes).unwrap();
        assert_eq!((c.residues[0], v.residues[0]), (0, 1));
    }
    assert_eq!(parity_values(&s, &supports).unwrap(), BTreeSet::from([(0, 1)]));

    let zeros = settings.iter().map(|st| (st.clone(), vec![0, 0, 0])).collect();
    let (c, v) = parity_functional(&s, &zeros).unwrap();
    assert_eq!((c.residues[0], v.residues[0]), (0, 0));

    let mut missing: BTreeMap<Vec<String>, Vec<usize>> = zeros;
    missing.remove(&settings[2]);
    assert!(matches!(parity_functional(&s, &missing), Err(Error::MissingSetting(_))));
}

#[test]
fn parity_functional_sums_in_z3() {
    let s = MerminScenario {
        group: group("Z3"),
        parties: 2,
        measurements: BTreeMap::from([
            ("X".to_string(), PhaseAngles::zero(3)),
            ("Y".to_string(), PhaseAngles::zero(3)),
            ("Z".to_string(), PhaseAngles::zero(3)),
        ]),
        control: names(&["X", "X"]),
        variations: vec![names(&["X", "Y"]), names(&["Y", "Z"]), names(&["Z", "X"])],
    };
    let outcomes = BTreeMap::from([
        (names(&["X", "X"]), vec![1, 2]),
        (names(&["X", "Y"]), vec![0, 1]),
        (names(&["Y", "Z"]), vec![2, 2]),
        (names(&["Z", "X"]), vec![1, 0]),
    ]);
    let (c, v) = parity_functional(&s, &outcomes).unwrap();
    assert_eq!((c.residues[0], v.residues[0]), (0, 0));
}

#[test]
fn classic_scenario_has_no_hidden_state() {
    let pair = build_group_pair(&group("Z2"));
    let s = classic();
    let supports = scenario_supports(&pair, &s).unwrap();
    let r = lhv_search(&s, &supports, LhvOptions::default()).unwrap();
    assert_eq!(r.status, LhvStatus::Infeasible);
    assert!(r.states_examined <= 64, "{}", r.states_examined);
    for workers in [2, 3, 8] {
        assert_eq!(lhv_search(&s, &supports, LhvOptions { workers, ..Default::default() }).unwrap(), r);
    }
}

#[test]
fn control_only_is_feasible() {
    let pair = build_group_pair(&group("Z3"));
    let mut s = classic();
    s.group = group("Z3");
    s.measurements = BTreeMap::from([("X".to_string(), PhaseAngles::zero(3))]);
    s.variations.clear();
    let supports = scenario_supports(&pair, &s).unwrap();
    let r = lhv_search(&s, &supports, LhvOptions::default()).unwrap();
    assert!(r.is_feasible());
    assert!(witness_is_consistent(&s, &supports, r.witness.as_ref().unwrap()));
}

#[test]
fn search_cap_is_reported() {
    let pair = build_group_pair(&group("Z2"));
    let s = classic();
    let supports = scenario_supports(&pair, &s).unwrap();
    let err = lhv_search(&s, &supports, LhvOptions { cap: 63, workers: 1 }).unwrap_err();
    assert!(matches!(err, Error::SearchCapExceeded { cap: 63, .. }));
}

#[test]
fn unknown_measurement_is_rejected() {
    let text = r#"{"group":"Z2","parties":2,"measurements":{"X":[0,0]},"control":["X","Q"]}"#;
    assert!(matches!(MerminScenario::from_json(text), Err(Error::InvalidScenario(_))));
    let text = r#"{"group":"Z2","parties":2,"measurements":{"X":[0,0,0]},"control":["X","X"]}"#;
    assert!(matches!(MerminScenario::from_json(text), Err(Error::InvalidScenario(_))));
}

#[test]
fn scenario_json_round_trip() {
    let s = classic();
    assert_eq!(MerminScenario::from_json(&s.to_json()).unwrap(), s);
}

#[test]
fn classic_report_is_consistent() {
    let pair = build_group_pair(&group("Z2"));
    let r = mermin_report(&pair, &classic(), LhvOptions::default(), TOL).unwrap();
    assert!(r.conditions.passes && !r.lhv.is_feasible() && r.consistent);
    assert!(r.max_cross_check_residual.unwrap() < TOL);
    assert!(r.max_symmetry_residual < TOL);
    assert_eq!(r.parity_values, vec![(0, 1)]);
}

fn family_member(g: &str, n: usize, pattern: FamilyPattern, twist: i64) -> FamilyMember {
    let g = group(g);
    generalized_family(&g, n)
        .unwrap()
        .into_iter()
        .find(|m| m.pattern == pattern && m.twist == twist && m.multiplicity == g.exponent() && !m.shifted_control)
        .unwrap()
}

#[test]
fn z3_four_party_scenario_is_nonlocal() {
    let pair = build_group_pair(&group("Z3"));
    let m = family_member("Z3", 4, FamilyPattern::Spread, 1);
    let r = mermin_report(&pair, &m.scenario, LhvOptions::default(), TOL).unwrap();
    assert!(r.conditions.passes, "{:?}", r.conditions);
    assert_eq!(r.conditions.exponent, 3);
    assert!(!r.lhv.is_feasible() && r.consistent);
}

#[test]
fn equal_points_admit_a_hidden_state() {
    let pair = build_group_pair(&group("Z3"));
    let m = family_member("Z3", 4, FamilyPattern::Spread, 3);
    let r = mermin_report(&pair, &m.scenario, LhvOptions::default(), TOL).unwrap();
    assert!(r.conditions.multiplicities_divisible && !r.conditions.points_distinct);
    assert!(r.lhv.is_feasible() && r.consistent);
}

#[test]
fn family_on_z2_matches_the_argument() {
    let pair = build_group_pair(&group("Z2"));
    let mut passing = 0;
    for m in generalized_family(&group("Z2"), 3).unwrap() {
        let c = check_scenario_conditions(&m.scenario, &pair, TOL).unwrap();
        assert!(c.multiplicities_divisible && c.settings_parity_correlated, "{m:?}");
        let supports = scenario_supports(&pair, &m.scenario).unwrap();
        let r = lhv_search(&m.scenario, &supports, LhvOptions::default()).unwrap();
        if c.passes {
            passing += 1;
            assert!(!r.is_feasible());
        } else {
            assert!(witness_is_consistent(&m.scenario, &supports, r.witness.as_ref().unwrap()));
        }
    }
    assert!(passing > 0);
}

fn relabel(s: &MerminScenario, perm: &[usize], rename: &dyn Fn(&str) -> String) -> MerminScenario {
    let map = |setting: &Vec<String>| perm.iter().map(|&k| rename(&setting[k])).collect::<Vec<_>>();
    MerminScenario {
        group: s.group.clone(),
        parties: s.parties,
        measurements: s.measurements.iter().map(|(k, v)| (rename(k), v.clone())).collect(),
        control: map(&s.control),
        variations: s.variations.iter().map(map).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parity_supports_are_cosets(seed in 0u64..1000, which in 0usize..3, n in 1usize..=4) {
        let g = group(["Z2", "Z3", "Z2xZ2"][which]);
        let pair = build_group_pair(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, &g, n);
        let theta = s.setting_angles(&s.control).unwrap();
        if let CorrelationClass::ParityCorrelated(i) = correlation_class(&pair, &theta, TOL).unwrap() {
            let support = setting_distribution_analytic(&pair, &s, &s.control).unwrap().support();
            prop_assert_eq!(support.len(), g.order().pow(n as u32 - 1));
            prop_assert!(support.iter().all(|t| group_sum(&g, t) == i));
        }
    }

    #[test]
    fn distributions_are_party_symmetric(seed in 0u64..1000, which in 0usize..3, n in 2usize..=4) {
        let g = group(["Z2", "Z3", "Z2xZ2"][which]);
        let pair = build_group_pair(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, &g, n);
        let d = setting_distribution_bruteforce(&pair, &s, &s.control).unwrap();
        let perm: Vec<usize> = (0..n).rev().collect();
        prop_assert!(d.max_abs_diff(&d.permute_parties(&perm)).unwrap() < TOL);
    }

    #[test]
    fn lhv_verdict_ignores_labels(which in 0usize..4, rot in 0usize..4, suffix in "[a-z]{1,3}") {
        let pair_g = [("Z2", 3), ("Z3", 4), ("Z2", 3), ("Z3", 4)][which];
        let g = group(pair_g.0);
        let pair = build_group_pair(&g);
        let twist = if which < 2 { 1 } else { 0 };
        let base = family_member(pair_g.0, pair_g.1, FamilyPattern::Spread, twist).scenario;
        let n = base.parties;
        let perm: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
        let moved = relabel(&base, &perm, &|m| format!("{suffix}{m}"));
        let a = lhv_search(&base, &scenario_supports(&pair, &base).unwrap(), LhvOptions::default()).unwrap();
        let b = lhv_search(&moved, &scenario_supports(&pair, &moved).unwrap(), LhvOptions::default()).unwrap();
        prop_assert_eq!(a.status, b.status);
    }
}

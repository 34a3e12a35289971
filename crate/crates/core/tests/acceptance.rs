// SPDX-License-Identifier: Apache-2.0

//! The ten acceptance criteria. Runs without the test harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strongcomp::diagram::{
    self, apply_bipartite_bialgebra, boundary_path_counts, eliminate_parallel_edges, find_bialgebra_collapse,
    find_bialgebra_expand, fuse_step, hopf_step, is_three_layered, random_diagram, random_fragment_diagram,
    to_bialgebra_normal_form, Diagram, End, RandomDiagramParams,
};
use strongcomp::models::{enumerate_phase_group, frel_z2_pair, spek_observable, stab_phase_candidates};
use strongcomp::nonlocality::{
    check_scenario_conditions, generalized_family, lhv_search, parity_functional, scenario_supports,
    setting_distribution_analytic, setting_distribution_bruteforce, LhvOptions, DEFAULT_SEARCH_CAP,
};
use strongcomp::observables::OutcomeDistribution;
use strongcomp::pairs::{coherent_candidate_z3, fourier_structure, max_two_check};
use strongcomp::{
    build_group_pair, FiniteAbelianGroup, MerminScenario, ObservablePair, ObservableStructure, PhaseAngles, SemiTensor,
    Semiring,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GROUPS: [&str; 10] = ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z2xZ4", "Z8", "Z2xZ2xZ2"];

fn group(name: &str) -> FiniteAbelianGroup {
    name.parse().unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:.2?}, budget {budget:?}"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Invariant factors from the prime-power decomposition of each factor.
fn oracle_invariant_factors(factors: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &f in factors {
        let mut n = f;
        let mut p = 2;
        while n > 1 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            if q > 1 {
                by_prime.entry(p).or_default().push(q);
            }
            p += 1;
        }
    }
    let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; rank];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (k, q) in powers.iter().enumerate() {
            out[rank - 1 - k] *= q;
        }
    }
    if out.is_empty() {
        out.push(1);
    }
    out
}

fn oracle_exponent(factors: &[u64]) -> u64 {
    factors.iter().fold(1, |acc, &f| acc / gcd(acc, f) * f)
}

fn inner(a: &SemiTensor, b: &SemiTensor) -> f64 {
    let ip: strongcomp::C64 = a.data().iter().zip(b.data()).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr() / (a.norm().powi(2) * b.norm().powi(2))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for name in GROUPS {
        let g = group(name);
        let pair = build_group_pair(&g);
        let sc = pair.check_strong_complementarity(1e-10).map_err(|e| e.to_string())?;
        ensure(sc.strongly_complementary, || format!("{name} is not strongly complementary"))?;
        for e in &sc.equations {
            ensure(e.residual < 1e-10, || format!("{name}: {} residual {:e}", e.name, e.residual))?;
        }
        // Mutual unbiasedness of the two classical bases.
        let (w, k) = (pair.white().classical_points().unwrap(), pair.gray().classical_points().unwrap());
        let d = g.order() as f64;
        for a in &w {
            for b in &k {
                ensure((inner(a, b) - 1.0 / d).abs() < 1e-10, || format!("{name}: bases are biased"))?;
            }
        }
        let kg = pair.extract_subgroup_k(1e-10).map_err(|e| e.to_string())?;
        let want = oracle_invariant_factors(g.factors());
        ensure(kg.group.canonical().factors() == want.as_slice(), || {
            format!("{name}: K has invariant factors {:?}, want {want:?}", kg.group.canonical().factors())
        })?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{} groups in {:.2?}", GROUPS.len(), start.elapsed()))
}

fn criterion_2() -> Outcome {
    for name in GROUPS {
        let g = group(name);
        let pair = build_group_pair(&g);
        let c = pair.check_complementarity(1e-9).map_err(|e| e.to_string())?;
        ensure(c.holds, || format!("{name}: hopf law residual {:e}", c.residual))?;
        let k = oracle_exponent(g.factors()) as usize;
        let oh = pair.check_order_hopf(k, 1e-9).map_err(|e| e.to_string())?;
        ensure(oh.holds, || format!("{name}: {k} parallel wires residual {:e}", oh.residual))?;
    }
    Ok(format!("{} groups", GROUPS.len()))
}

fn criterion_3() -> Outcome {
    for name in GROUPS {
        let g = group(name);
        let pair = build_group_pair(&g);
        let r = pair.antipode_report(1e-10).map_err(|e| e.to_string())?;
        for c in [&r.self_adjoint, &r.white_endomorphism, &r.gray_endomorphism] {
            ensure(c.holds && c.residual < 1e-10, || format!("{name}: {} residual {:e}", c.name, c.residual))?;
        }
        let s = pair.antipode();
        let d = g.order();
        for col in 0..d {
            let el = g.element(col);
            let neg: Vec<u64> = el.residues.iter().zip(g.factors()).map(|(&r, &f)| (f - r) % f).collect();
            let target = g.index_of(&strongcomp::GroupElement::new(neg)).unwrap();
            for row in 0..d {
                let want = if row == target { 1.0 } else { 0.0 };
                let z = s.entry(row, col);
                ensure((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10, || {
                    format!("{name}: antipode entry ({row},{col}) = {z}")
                })?;
            }
        }
    }
    Ok(format!("{} groups", GROUPS.len()))
}

fn criterion_4() -> Outcome {
    let copy = ObservableStructure::copy(Semiring::ComplexDouble, 4);
    let z4 = fourier_structure(&group("Z4")).map_err(|e| e.to_string())?;
    let klein = fourier_structure(&group("Z2xZ2")).map_err(|e| e.to_string())?;
    let r = max_two_check(&copy, &z4, &klein, 1e-9).map_err(|e| e.to_string())?;
    ensure(r.first_sc && r.second_sc, || "copy is not strongly complementary to both transforms".into())?;
    ensure(!r.grays_complementary && !r.grays_sc, || "the two transforms are complementary".into())?;
    ensure(r.grays_complementarity_residual > 0.1 && r.grays_bialgebra_residual > 0.1, || {
        format!("residuals {:e}, {:e}", r.grays_complementarity_residual, r.grays_bialgebra_residual)
    })?;
    Ok(format!(
        "hopf residual {:.3}, bialgebra residual {:.3}",
        r.grays_complementarity_residual, r.grays_bialgebra_residual
    ))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn single_setting(g: &FiniteAbelianGroup, angles: Vec<PhaseAngles>) -> MerminScenario {
    let names: Vec<String> = (0..angles.len()).map(|k| format!("m{k}")).collect();
    MerminScenario {
        group: g.clone(),
        parties: angles.len(),
        measurements: names.iter().cloned().zip(angles).collect(),
        control: names,
        variations: vec![],
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let groups = [group("Z2"), group("Z3"), group("Z2xZ2")];
    let pairs: Vec<ObservablePair> = groups.iter().map(build_group_pair).collect();
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let gi = rng.random_range(0..groups.len());
        let (g, pair) = (&groups[gi], &pairs[gi]);
        let n = rng.random_range(2..=4);
        let angles: Vec<PhaseAngles> = (0..n)
            .map(|_| {
                let turns = (0..g.order())
                    .map(|k| if k == 0 { Rational64::from_integer(0) } else { Rational64::new(rng.random_range(0..24), 24) })
                    .collect();
                PhaseAngles::new(turns).unwrap()
            })
            .collect();
        let sc = single_setting(g, angles.clone());
        let brute = setting_distribution_bruteforce(pair, &sc, &sc.control).map_err(|e| e.to_string())?;
        let closed = setting_distribution_analytic(pair, &sc, &sc.control).map_err(|e| e.to_string())?;
        let diff = brute.max_abs_diff(&closed).map_err(|e| e.to_string())?;
        worst.0 = worst.0.max(diff);
        ensure(diff <= 1e-9, || format!("{g} n={n}: closed form differs by {diff:e}"))?;
        for perm in permutations(n) {
            // Party k of the permuted setting is party perm[k] of the original.
            let moved = single_setting(g, perm.iter().map(|&p| angles[p].clone()).collect());
            let dist = setting_distribution_bruteforce(pair, &moved, &moved.control).map_err(|e| e.to_string())?;
            let want = permuted(&brute, &perm);
            let d = dist.max_abs_diff(&want).map_err(|e| e.to_string())?;
            worst.1 = worst.1.max(d);
            ensure(d <= 1e-9, || format!("{g} n={n}: permutation {perm:?} moves statistics by {d:e}"))?;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("closed form {:.1e}, symmetry {:.1e}, {:.2?}", worst.0, worst.1, start.elapsed()))
}

/// Statistics of the parties read in the order `perm`.
fn permuted(dist: &OutcomeDistribution, perm: &[usize]) -> OutcomeDistribution {
    let probs = (0..dist.probabilities.len())
        .map(|i| {
            let t = dist.tuple(i);
            let mut orig = vec![0; t.len()];
            for (k, &p) in perm.iter().enumerate() {
                orig[p] = t[k];
            }
            dist.get(&orig)
        })
        .collect();
    OutcomeDistribution::new(dist.arity, dist.outcomes, probs).unwrap()
}

fn classic_scenario() -> MerminScenario {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/classic-z2.json");
    MerminScenario::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let scenario = classic_scenario();
    let pair = build_group_pair(&scenario.group);
    let even: BTreeSet<Vec<usize>> = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]].iter().map(|t| t.to_vec()).collect();
    let odd: BTreeSet<Vec<usize>> = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]].iter().map(|t| t.to_vec()).collect();
    let mut supports = Vec::new();
    for (k, s) in scenario.settings().into_iter().enumerate() {
        let dist = setting_distribution_bruteforce(&pair, &scenario, s).map_err(|e| e.to_string())?;
        let support: BTreeSet<Vec<usize>> = dist.support().into_iter().collect();
        let want = if k == 0 { &even } else { &odd };
        ensure(&support == want, || format!("{}: support {support:?}", s.join("")))?;
        for t in &support {
            ensure((dist.get(t) - 0.25).abs() <= 1e-9, || format!("{}: p{t:?} = {}", s.join(""), dist.get(t)))?;
        }
        supports.push(dist.support());
    }
    let c = check_scenario_conditions(&scenario, &pair, 1e-9).map_err(|e| e.to_string())?;
    ensure(c.passes, || format!("conditions fail: {c:?}"))?;
    let settings: Vec<Vec<String>> = scenario.settings().iter().map(|s| s.to_vec()).collect();
    let mut values = BTreeSet::new();
    for combo in 0..4usize.pow(4) {
        let outcomes: BTreeMap<Vec<String>, Vec<usize>> = (0..4)
            .map(|k| (settings[k].clone(), supports[k][(combo >> (2 * k)) & 3].clone()))
            .collect();
        let (a, b) = parity_functional(&scenario, &outcomes).map_err(|e| e.to_string())?;
        values.insert((a.residues[0], b.residues[0]));
    }
    ensure(values == BTreeSet::from([(0, 1)]), || format!("parity values {values:?}"))?;
    let r = lhv_search(&scenario, &supports, LhvOptions::default()).map_err(|e| e.to_string())?;
    ensure(!r.is_feasible(), || "a hidden state reproduces the supports".into())?;
    ensure(r.states_examined <= 64, || format!("{} hidden states examined", r.states_examined))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("infeasible after {} states, {:.2?}", r.states_examined, start.elapsed()))
}

/// Every setting's outcome tuple under the assignment lies in that
/// setting's support, as computed from the full tensor.
fn witness_reproduces(pair: &ObservablePair, scenario: &MerminScenario, witness: &HashMap<(usize, String), usize>) -> bool {
    scenario.settings().iter().all(|s| {
        let tuple: Option<Vec<usize>> = s.iter().enumerate().map(|(p, m)| witness.get(&(p, m.clone())).copied()).collect();
        let dist = setting_distribution_bruteforce(pair, scenario, s).unwrap();
        tuple.is_some_and(|t| dist.get(&t) > 1e-9)
    })
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let options = LhvOptions { cap: DEFAULT_SEARCH_CAP, workers: 4 };
    let (mut passing, mut violating, mut total) = (0, 0, 0);
    for name in ["Z2", "Z3", "Z4"] {
        let g = group(name);
        let pair = build_group_pair(&g);
        let exp = oracle_exponent(g.factors());
        for n in [3, 4] {
            let family = generalized_family(&g, n).map_err(|e| e.to_string())?;
            for m in family {
                total += 1;
                ensure(m.multiplicity == exp || m.multiplicity == 2 * exp, || {
                    format!("{name} n={n}: multiplicity {}", m.multiplicity)
                })?;
                let label = format!("{name} n={n} {:?} x{} twist {}", m.pattern, m.multiplicity, m.twist);
                let c = check_scenario_conditions(&m.scenario, &pair, 1e-9).map_err(|e| e.to_string())?;
                let supports = scenario_supports(&pair, &m.scenario).map_err(|e| e.to_string())?;
                let r = lhv_search(&m.scenario, &supports, options).map_err(|e| e.to_string())?;
                if c.passes {
                    passing += 1;
                    ensure(!r.is_feasible(), || format!("{label}: conditions pass but a hidden state exists"))?;
                }
                if !c.points_distinct {
                    violating += 1;
                    let w = r.witness.as_ref().ok_or_else(|| format!("{label}: coincident points but no hidden state"))?;
                    let map = w.iter().map(|h| ((h.party, h.measurement.clone()), h.outcome)).collect();
                    ensure(witness_reproduces(&pair, &m.scenario, &map), || format!("{label}: witness is wrong"))?;
                }
            }
        }
    }
    ensure(passing > 0 && violating > 0, || format!("{passing} passing and {violating} violating members"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("{total} scenarios, {passing} nonlocal, {violating} with witnesses, {:.2?}", start.elapsed()))
}

fn residual(a: &Diagram, b: &Diagram, pair: &ObservablePair) -> f64 {
    let x = diagram::evaluate(a, pair).unwrap();
    let y = diagram::evaluate(b, pair).unwrap();
    SemiTensor::proportionality(&x, &y).unwrap().residual
}

/// Directed input-to-output path counts by memoised depth-first search.
fn oracle_paths(d: &Diagram) -> Vec<Vec<u64>> {
    fn from(d: &Diagram, e: End, memo: &mut HashMap<End, Vec<u64>>) -> Vec<u64> {
        if let End::Output(j) = e {
            let mut v = vec![0; d.outputs()];
            v[j] = 1;
            return v;
        }
        if let Some(v) = memo.get(&e) {
            return v.clone();
        }
        let mut acc = vec![0; d.outputs()];
        for edge in d.edges().iter().filter(|x| x.source == e) {
            for (a, b) in acc.iter_mut().zip(from(d, edge.target, memo)) {
                *a += b;
            }
        }
        memo.insert(e, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    (0..d.inputs()).map(|i| from(d, End::Input(i), &mut memo)).collect()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pairs = [build_group_pair(&group("Z2")), build_group_pair(&group("Z3"))];
    let params = RandomDiagramParams { max_spiders: 6, ..RandomDiagramParams::default() };
    let mut steps = 0;
    let mut worst = 0.0f64;
    let mut check = |label: &str, a: &Diagram, b: &Diagram, pair: &ObservablePair| -> Result<(), String> {
        let r = residual(a, b, pair);
        worst = worst.max(r);
        steps += 1;
        ensure(r <= 1e-9, || format!("{label} residual {r:e}"))
    };
    for i in 0..200 {
        let pair = &pairs[i % 2];
        let k = pair.dim();
        let d = random_diagram(&mut rng, &params, k);
        let mut cur = d.clone();
        while let Some(s) = fuse_step(&cur).map_err(|e| e.to_string())? {
            check("fuse", &cur, &s.result, pair)?;
            cur = s.result;
        }
        if let Some(s) = eliminate_parallel_edges(&cur, k) {
            check("parallel-k", &cur, &s.result, pair)?;
        }
        if let Some(s) = hopf_step(&cur) {
            check("hopf", &cur, &s.result, pair)?;
        }
        for m in [find_bialgebra_expand(&cur), find_bialgebra_collapse(&cur)].into_iter().flatten() {
            let s = apply_bipartite_bialgebra(&cur, &m).map_err(|e| e.to_string())?;
            check("bialgebra", &cur, &s.result, pair)?;
        }
        let f = random_fragment_diagram(&mut rng, 6, 2, 3);
        let nf = to_bialgebra_normal_form(&f).map_err(|e| e.to_string())?;
        ensure(is_three_layered(&nf), || format!("diagram {i}: normal form is not three-layered"))?;
        let want = oracle_paths(&f);
        ensure(oracle_paths(&nf) == want, || format!("diagram {i}: path counts change"))?;
        ensure(boundary_path_counts(&f).map_err(|e| e.to_string())? == want, || format!("diagram {i}: path counter disagrees"))?;
        check("normal form", &f, &nf, pair)?;
    }
    Ok(format!("200 diagrams, {steps} steps, worst residual {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let frel = frel_z2_pair();
    let sc = frel.check_strong_complementarity(0.0).map_err(|e| e.to_string())?;
    ensure(sc.strongly_complementary && sc.max_residual() == 0.0, || format!("relational pair: {sc:?}"))?;
    let spek = spek_observable().map_err(|e| e.to_string())?;
    let pg = enumerate_phase_group(&spek.structure, None, 0.0).map_err(|e| e.to_string())?;
    ensure(pg.group.is_isomorphic(&group("Z2xZ2")), || format!("toy-theory phases form {}", pg.group))?;
    let stab = ObservableStructure::copy(Semiring::ComplexDouble, 2);
    let candidates = stab_phase_candidates();
    let pq = enumerate_phase_group(&stab, Some(&candidates), 1e-9).map_err(|e| e.to_string())?;
    ensure(pq.group.is_isomorphic(&group("Z4")), || format!("stabilizer phases form {}", pq.group))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("{} and {}, {:.2?}", pg.group, pq.group, start.elapsed()))
}

fn criterion_10() -> Outcome {
    for name in GROUPS {
        let r = build_group_pair(&group(name)).check_sharpness_criterion(1e-10).map_err(|e| e.to_string())?;
        ensure(r.holds && r.criterion.residual < 1e-10, || format!("{name}: residual {:e}", r.criterion.residual))?;
        ensure(!r.implication_violated, || format!("{name}: implication violated"))?;
    }
    let mut fail_residual = f64::INFINITY;
    for k in 1..=12 {
        let phi = 0.25 * k as f64;
        let pair = coherent_candidate_z3(phi).map_err(|e| e.to_string())?;
        let r = pair.check_sharpness_criterion(1e-10).map_err(|e| e.to_string())?;
        ensure(!r.implication_violated, || format!("phi={phi}: criterion holds without strong complementarity"))?;
        if k == 4 {
            ensure(r.coherent && !r.strongly_complementary, || format!("phi={phi}: candidate is {r:?}"))?;
            fail_residual = r.criterion.residual;
            ensure(fail_residual > 0.1, || format!("phi={phi}: residual {fail_residual:e}"))?;
        }
    }
    Ok(format!("perturbed residual {fail_residual:.3}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("classification round trip", criterion_1),
        ("complementarity and order hopf", criterion_2),
        ("antipode", criterion_3),
        ("at most two", criterion_4),
        ("GHZ correlations", criterion_5),
        ("classic Mermin instance", criterion_6),
        ("generalized scenarios", criterion_7),
        ("rewrite soundness", criterion_8),
        ("relational and toy models", criterion_9),
        ("sharpness criterion", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{
    check_scenario_conditions, correlation_class, lhv_search, parity_values, setting_distribution_analytic,
    setting_distribution_bruteforce, CorrelationClass, LhvOptions, LhvResult, MerminScenario, ScenarioConditions,
};
use crate::error::Result;
use crate::observables::OutcomeDistribution;
use crate::pairs::ObservablePair;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SettingReport {
    pub setting: Vec<String>,
    pub class: CorrelationClass,
    pub support: Vec<Vec<usize>>,
    pub probabilities: Vec<f64>,
    /// Largest difference between the closed form and the full tensor, when
    /// the model carries a group.
    pub cross_check_residual: Option<f64>,
    /// Largest change of any probability under a permutation of parties.
    pub symmetry_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MerminReport {
    pub settings: Vec<SettingReport>,
    pub max_cross_check_residual: Option<f64>,
    pub max_symmetry_residual: f64,
    pub conditions: ScenarioConditions,
    /// `(control parity, variations parity)` over all supported outcomes.
    pub parity_values: Vec<(usize, usize)>,
    pub lhv: LhvResult,
    /// Whether the conditions pass exactly when no hidden state exists.
    pub consistent: bool,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn symmetry_residual(dist: &OutcomeDistribution) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for perm in permutations(dist.arity) {
        worst = worst.max(dist.max_abs_diff(&dist.permute_parties(&perm))?);
    }
    Ok(worst)
}

/// Distributions, the two hypotheses and the hidden-state search for one
/// scenario. Party permutations are enumerated in full, so this is meant
/// for small party counts.
pub fn mermin_report(
    pair: &ObservablePair,
    scenario: &MerminScenario,
    options: LhvOptions,
    tol: f64,
) -> Result<MerminReport> {
    scenario.validate()?;
    let mut settings = Vec::new();
    let mut supports = Vec::new();
    for s in scenario.settings() {
        let brute = setting_distribution_bruteforce(pair, scenario, s)?;
        let cross = match pair.group() {
            Some(_) => Some(setting_distribution_analytic(pair, scenario, s)?.max_abs_diff(&brute)?),
            None => None,
        };
        let support = brute.support();
        supports.push(support.clone());
        settings.push(SettingReport {
            setting: s.to_vec(),
            class: correlation_class(pair, &scenario.setting_angles(s)?, tol)?,
            support,
            symmetry_residual: symmetry_residual(&brute)?,
            probabilities: brute.probabilities,
            cross_check_residual: cross,
        });
    }
    let conditions = check_scenario_conditions(scenario, pair, tol)?;
    let lhv = lhv_search(scenario, &supports, options)?;
    let max_cross_check_residual =
        settings.iter().map(|s| s.cross_check_residual).try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
    let max_symmetry_residual = settings.iter().map(|s| s.symmetry_residual).fold(0.0, f64::max);
    Ok(MerminReport {
        parity_values: parity_values(scenario, &supports)?.into_iter().collect(),
        consistent: conditions.passes != lhv.is_feasible(),
        settings,
        max_cross_check_residual,
        max_symmetry_residual,
        conditions,
        lhv,
    })
}

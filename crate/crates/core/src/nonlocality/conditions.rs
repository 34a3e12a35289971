// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

use super::{correlation_class, CorrelationClass, MerminScenario};
use crate::error::Result;
use crate::observables::PhaseAngles;
use crate::pairs::ObservablePair;

/// How often a measurement occurs on one party across the variations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicityCount {
    pub party: usize,
    pub measurement: String,
    pub in_variations: u64,
    pub in_control: bool,
    /// Whether `in_variations − [in_control]` is a multiple of the exponent.
    pub divisible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConditions {
    /// Exponent of the group of scaled gray points.
    pub exponent: u64,
    pub multiplicities: Vec<MultiplicityCount>,
    pub multiplicities_divisible: bool,
    /// Classes of the control and each variation, in that order.
    pub setting_classes: Vec<CorrelationClass>,
    pub settings_parity_correlated: bool,
    pub control_point: Option<usize>,
    pub variations_point: Option<usize>,
    pub points_distinct: bool,
    pub passes: bool,
}

/// The two hypotheses of the generalised Mermin argument.
///
/// Multiplicity: for each party and measurement, the number of variations
/// using it, less one if the control uses it, is a multiple of the exponent
/// of the scaled gray points. Every setting must also be parity-correlated.
///
/// Distinctness: the control's summed phase and the sum of all variation
/// phases are proportional to different gray classical points.
pub fn check_scenario_conditions(scenario: &MerminScenario, pair: &ObservablePair, tol: f64) -> Result<ScenarioConditions> {
    scenario.validate()?;
    let exponent = pair.extract_subgroup_k(tol)?.group.exponent();

    let mut counts: BTreeMap<(usize, &str), u64> = BTreeMap::new();
    for v in &scenario.variations {
        for (k, m) in v.iter().enumerate() {
            *counts.entry((k, m.as_str())).or_default() += 1;
        }
    }
    for (k, m) in scenario.control.iter().enumerate() {
        counts.entry((k, m.as_str())).or_default();
    }
    let multiplicities: Vec<MultiplicityCount> = counts
        .into_iter()
        .map(|((party, m), n)| {
            let in_control = scenario.control[party] == m;
            let excess = n as i64 - i64::from(in_control);
            MultiplicityCount {
                party,
                measurement: m.to_string(),
                in_variations: n,
                in_control,
                divisible: excess.rem_euclid(exponent as i64) == 0,
            }
        })
        .collect();
    let multiplicities_divisible = multiplicities.iter().all(|c| c.divisible);

    let setting_classes: Vec<CorrelationClass> = scenario
        .settings()
        .iter()
        .map(|s| correlation_class(pair, &scenario.setting_angles(s)?, tol))
        .collect::<Result<_>>()?;
    let settings_parity_correlated = setting_classes.iter().all(|c| matches!(c, CorrelationClass::ParityCorrelated(_)));

    let point = |c: CorrelationClass| match c {
        CorrelationClass::ParityCorrelated(i) => Some(i),
        _ => None,
    };
    let control_point = point(setting_classes[0]);
    let dim = scenario.group.order();
    let mut theta_v = PhaseAngles::zero(dim);
    for v in &scenario.variations {
        theta_v = theta_v.add(&scenario.setting_angles(v)?)?;
    }
    let variations_point = point(correlation_class(pair, &theta_v, tol)?);
    let points_distinct = matches!((control_point, variations_point), (Some(a), Some(b)) if a != b);

    Ok(ScenarioConditions {
        exponent,
        multiplicities,
        multiplicities_divisible,
        setting_classes,
        settings_parity_correlated,
        control_point,
        variations_point,
        points_distinct,
        passes: multiplicities_divisible && settings_parity_correlated && points_distinct,
    })
}

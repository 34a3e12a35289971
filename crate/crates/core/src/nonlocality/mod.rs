// SPDX-License-Identifier: Apache-2.0

//! GHZ correlations and possibilistic Mermin arguments.
//!
//! A scenario fixes `n` parties sharing the white GHZ state, a set of named
//! measurements (white phases, measured in the gray basis), a control
//! setting and a list of variation settings.

mod conditions;
mod family;
mod lhv;
mod mermin;
#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{FiniteAbelianGroup, GroupElement, SemiTensor, C64};
use crate::error::{Error, Result};
use crate::observables::{born_distribution, OutcomeDistribution, PhaseAngles};
use crate::pairs::ObservablePair;

pub use conditions::{check_scenario_conditions, MultiplicityCount, ScenarioConditions};
pub use family::{generalized_family, FamilyMember, FamilyPattern};
pub use lhv::{lhv_search, witness_is_consistent, HiddenAssignment, LhvOptions, LhvResult, LhvStatus, DEFAULT_SEARCH_CAP};
pub use mermin::{mermin_report, MerminReport, SettingReport};

fn group_as_str<S: Serializer>(g: &FiniteAbelianGroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&g.to_string())
}

fn group_from_str<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<FiniteAbelianGroup, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// ```json
/// {"group": "Z2", "parties": 3,
///  "measurements": {"X": [0, 0], "Y": [0, "1/4"]},
///  "control": ["X", "X", "X"],
///  "variations": [["X", "Y", "Y"], ["Y", "X", "Y"], ["Y", "Y", "X"]]}
/// ```
///
/// Angle entries are turns `r` (phase `e^{2πir}`) indexed by the white
/// classical points in group element order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MerminScenario {
    #[serde(serialize_with = "group_as_str", deserialize_with = "group_from_str")]
    pub group: FiniteAbelianGroup,
    pub parties: usize,
    pub measurements: BTreeMap<String, PhaseAngles>,
    pub control: Vec<String>,
    #[serde(default)]
    pub variations: Vec<Vec<String>>,
}

impl MerminScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.parties == 0 {
            return bad("a scenario needs at least one party".into());
        }
        let d = self.group.order();
        for (name, angles) in &self.measurements {
            if angles.dim() != d {
                return bad(format!("measurement {name:?} has {} angles, {} expected", angles.dim(), d));
            }
        }
        for setting in self.settings() {
            if setting.len() != self.parties {
                return bad(format!("setting {setting:?} does not have {} entries", self.parties));
            }
            if let Some(m) = setting.iter().find(|m| !self.measurements.contains_key(*m)) {
                return bad(format!("unknown measurement {m:?}"));
            }
        }
        Ok(())
    }

    /// The control followed by the variations.
    pub fn settings(&self) -> Vec<&[String]> {
        std::iter::once(self.control.as_slice()).chain(self.variations.iter().map(Vec::as_slice)).collect()
    }

    /// Summed angle vector of one setting.
    pub fn setting_angles(&self, setting: &[String]) -> Result<PhaseAngles> {
        let mut acc = PhaseAngles::zero(self.group.order());
        for m in setting {
            let a = self.measurements.get(m).ok_or_else(|| Error::InvalidScenario(format!("unknown measurement {m:?}")))?;
            acc = acc.add(a)?;
        }
        Ok(acc)
    }

    /// Every `(party, measurement)` pair used by some setting, sorted.
    pub fn variables(&self) -> Vec<(usize, String)> {
        let set: BTreeSet<(usize, String)> =
            self.settings().iter().flat_map(|s| s.iter().cloned().enumerate()).collect();
        set.into_iter().collect()
    }
}

/// How the outcomes of a GHZ setting are correlated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationClass {
    /// Outcomes are independent and uniform.
    Uncorrelated,
    /// Outcomes always sum to the given group element (by index).
    ParityCorrelated(usize),
    Other,
}

/// The white `(0, n)` spider scaled to a unit vector.
pub fn ghz_state(pair: &ObservablePair, n: usize) -> Result<SemiTensor> {
    let s = pair.white().spider(0, n, None)?;
    let norm = s.norm();
    if !(norm > 0.0) {
        return Err(Error::NonNormalizable);
    }
    Ok(s.scale(C64::new(1.0 / norm, 0.0)))
}

fn check_setting(pair: &ObservablePair, scenario: &MerminScenario, setting: &[String]) -> Result<()> {
    if scenario.group.order() != pair.dim() {
        return Err(Error::InvalidScenario(format!(
            "scenario over {} does not fit a model of dimension {}",
            scenario.group,
            pair.dim()
        )));
    }
    if setting.len() != scenario.parties {
        return Err(Error::InvalidScenario(format!("setting {setting:?} does not have {} entries", scenario.parties)));
    }
    Ok(())
}

/// Born statistics from the full tensor: phase gates on each leg of the
/// GHZ state, then projection onto the gray classical points.
pub fn setting_distribution_bruteforce(
    pair: &ObservablePair,
    scenario: &MerminScenario,
    setting: &[String],
) -> Result<OutcomeDistribution> {
    check_setting(pair, scenario, setting)?;
    let white = pair.white();
    let mut state = ghz_state(pair, scenario.parties)?;
    for (leg, m) in setting.iter().enumerate() {
        let angles = scenario.measurements.get(m).ok_or_else(|| Error::InvalidScenario(format!("unknown measurement {m:?}")))?;
        let gate = white.phase_gate(&white.phase_from_angles(angles)?)?;
        state = state.apply_to_output(leg, &gate)?;
    }
    born_distribution(pair.gray(), &state)
}

/// Statistics from the summed decoration alone: the probability of a tuple
/// depends only on the group sum `s` of its outcomes, through
/// `|Σ_j c_j χ_j(s)|²` with `c_j` the coefficients of `ψ_Θ` on the white
/// classical points.
pub fn setting_distribution_analytic(
    pair: &ObservablePair,
    scenario: &MerminScenario,
    setting: &[String],
) -> Result<OutcomeDistribution> {
    check_setting(pair, scenario, setting)?;
    let theta = scenario.setting_angles(setting)?;
    let psi = pair.white().phase_from_angles(&theta)?;
    ghz_point_distribution(pair, scenario.parties, &psi)
}

/// [`setting_distribution_analytic`] for an arbitrary white decoration `ψ`.
pub fn ghz_point_distribution(pair: &ObservablePair, n: usize, psi: &SemiTensor) -> Result<OutcomeDistribution> {
    let g = pair
        .group()
        .ok_or_else(|| Error::PointsUnavailable("the closed form needs a model built from a group".into()))?;
    let d = g.order();
    if psi.out_dims() != [d] || !psi.in_dims().is_empty() {
        return Err(Error::DimensionMismatch(format!("decoration is not a state on {d}")));
    }
    let chars: Vec<Vec<C64>> = g.elements().iter().map(|j| g.character_vector(j)).collect::<Result<_>>()?;
    // χ_j are orthogonal with squared norm D.
    let coeffs: Vec<C64> = chars
        .iter()
        .map(|chi| chi.iter().zip(psi.data()).map(|(a, b)| a.conj() * b).sum::<C64>() / d as f64)
        .collect();
    let weight: Vec<f64> = (0..d)
        .map(|s| coeffs.iter().zip(&chars).map(|(c, chi)| c * chi[s]).sum::<C64>().norm_sqr())
        .collect();
    let total: f64 = weight.iter().sum();
    if !(total > 1e-300) || !total.is_finite() {
        return Err(Error::NonNormalizable);
    }
    let per_sum = (d as f64).powi(n as i32 - 1);
    let mut probabilities = Vec::with_capacity(d.pow(n as u32));
    let mut tuple = vec![0usize; n];
    for _ in 0..d.pow(n as u32) {
        let s = tuple.iter().fold(0, |acc, &x| g.add_index(acc, x));
        probabilities.push(weight[s] / total / per_sum);
        for k in (0..n).rev() {
            tuple[k] += 1;
            if tuple[k] < d {
                break;
            }
            tuple[k] = 0;
        }
    }
    OutcomeDistribution::new(n, d, probabilities)
}

/// Classifies `ψ_Θ` by proportionality to a white classical point
/// (uncorrelated) or to a gray classical point (parity-correlated).
pub fn correlation_class(pair: &ObservablePair, theta: &PhaseAngles, tol: f64) -> Result<CorrelationClass> {
    let psi = pair.white().phase_from_angles(theta)?;
    classify_decoration(pair, &psi, tol)
}

pub fn classify_decoration(pair: &ObservablePair, psi: &SemiTensor, tol: f64) -> Result<CorrelationClass> {
    for p in pair.white().classical_points()? {
        if SemiTensor::equal_up_to_scalar(psi, &p, tol)?.is_some() {
            return Ok(CorrelationClass::Uncorrelated);
        }
    }
    for (i, p) in pair.gray().classical_points()?.iter().enumerate() {
        if SemiTensor::equal_up_to_scalar(psi, p, tol)?.is_some() {
            return Ok(CorrelationClass::ParityCorrelated(i));
        }
    }
    Ok(CorrelationClass::Other)
}

/// Control parity and total variation parity for one outcome tuple per
/// setting, keyed by setting.
pub fn parity_functional(
    scenario: &MerminScenario,
    outcomes: &BTreeMap<Vec<String>, Vec<usize>>,
) -> Result<(GroupElement, GroupElement)> {
    let g = &scenario.group;
    let sum_of = |setting: &[String]| -> Result<usize> {
        let t = outcomes.get(setting).ok_or_else(|| Error::MissingSetting(setting.join(",")))?;
        if t.len() != setting.len() || t.iter().any(|&x| x >= g.order()) {
            return Err(Error::InvalidScenario(format!("outcome tuple {t:?} does not fit setting {setting:?}")));
        }
        Ok(t.iter().fold(0, |acc, &x| g.add_index(acc, x)))
    };
    let control = sum_of(&scenario.control)?;
    let mut total = 0;
    for v in &scenario.variations {
        total = g.add_index(total, sum_of(v)?);
    }
    Ok((g.element(control), g.element(total)))
}

/// Every `(control parity, variations parity)` pair reachable by picking one
/// supported tuple per setting. `supports` follows
/// [`MerminScenario::settings`].
pub fn parity_values(scenario: &MerminScenario, supports: &[Vec<Vec<usize>>]) -> Result<BTreeSet<(usize, usize)>> {
    let g = &scenario.group;
    if supports.len() != scenario.settings().len() {
        return Err(Error::InvalidScenario(format!("{} supports for {} settings", supports.len(), scenario.settings().len())));
    }
    let sums = |s: &Vec<Vec<usize>>| -> BTreeSet<usize> {
        s.iter().map(|t| t.iter().fold(0, |acc, &x| g.add_index(acc, x))).collect()
    };
    let control = sums(&supports[0]);
    let mut total: BTreeSet<usize> = [0].into();
    for s in &supports[1..] {
        let here = sums(s);
        total = total.iter().flat_map(|&a| here.iter().map(move |&b| g.add_index(a, b))).collect();
    }
    Ok(control.iter().flat_map(|&c| total.iter().map(move |&t| (c, t))).collect())
}

/// Supports of every setting, control first, from the closed form when the
/// model carries a group and from the full tensor otherwise.
pub fn scenario_supports(pair: &ObservablePair, scenario: &MerminScenario) -> Result<Vec<Vec<Vec<usize>>>> {
    scenario
        .settings()
        .iter()
        .map(|s| {
            let dist = if pair.group().is_some() {
                setting_distribution_analytic(pair, scenario, s)?
            } else {
                setting_distribution_bruteforce(pair, scenario, s)?
            };
            Ok(dist.support())
        })
        .collect()
}

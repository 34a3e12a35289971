// SPDX-License-Identifier: Apache-2.0

//! Mermin scenarios over cyclic groups built from two measurements per
//! party, `X` (all angles zero) and a fractional phase `Y`.
//!
//! Every party uses `X` in exactly one of `μ + 1` variations and `Y` in the
//! other `μ`, with `μ` a multiple of the exponent, so the multiplicity
//! hypothesis holds by construction. The `Y` angles are chosen so that each
//! variation's summed phase is a gray classical point. Whether the control
//! and variation points differ depends on how the `X` slots are spread.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use super::MerminScenario;
use crate::algebra::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::observables::PhaseAngles;

/// Which variation holds each party's `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyPattern {
    /// Party `k` in variation `k mod (μ+1)`.
    Spread,
    /// Every party in variation 0.
    Concentrated,
    /// Parties `2i, 2i+1` in variation `i`.
    Paired,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyMember {
    pub scenario: MerminScenario,
    pub pattern: FamilyPattern,
    pub multiplicity: u64,
    /// Numerator `t` of the `Y` angles `-j·t/(g·d)`.
    pub twist: i64,
    /// Whether party 0 uses the shifted measurement `W` in place of `X`.
    pub shifted_control: bool,
}

/// Angles `-j·t/q` for `j = 0..d`.
fn linear_angles(d: u64, t: i64, q: i64) -> Result<PhaseAngles> {
    PhaseAngles::new((0..d as i64).map(|j| Rational64::new(-j * t, q)).collect())
}

/// All members for one cyclic group and party count: multiplicities `e` and
/// `2e`, the three patterns, every twist `t < g·d` where `g` is the gcd of
/// the per-variation `Y` counts, and controls with and without a shifted
/// `X` on party 0.
pub fn generalized_family(group: &FiniteAbelianGroup, parties: usize) -> Result<Vec<FamilyMember>> {
    if group.factors().len() != 1 || group.is_trivial() {
        return Err(Error::InvalidScenario(format!("family needs a nontrivial cyclic group, got {group}")));
    }
    if parties == 0 {
        return Err(Error::InvalidScenario("family needs at least one party".into()));
    }
    let d = group.order() as u64;
    let e = group.exponent();
    let mut out = Vec::new();
    for multiplicity in [e, 2 * e] {
        let v = multiplicity as usize + 1;
        for pattern in [FamilyPattern::Spread, FamilyPattern::Concentrated, FamilyPattern::Paired] {
            let slot: Vec<usize> = (0..parties)
                .map(|k| match pattern {
                    FamilyPattern::Spread => k % v,
                    FamilyPattern::Concentrated => 0,
                    FamilyPattern::Paired => (k / 2) % v,
                })
                .collect();
            let y_count: Vec<u64> = (0..v).map(|i| slot.iter().filter(|&&s| s != i).count() as u64).collect();
            let g = y_count.iter().fold(0u64, |acc, &m| acc.gcd(&m)).max(1);
            let q = (g * d) as i64;
            for twist in 0..q {
                for shifted_control in [false, true] {
                    let mut measurements = std::collections::BTreeMap::new();
                    measurements.insert("X".to_string(), PhaseAngles::zero(d as usize));
                    measurements.insert("Y".to_string(), linear_angles(d, twist, q)?);
                    if shifted_control {
                        measurements.insert("W".to_string(), linear_angles(d, 1, d as i64)?);
                    }
                    let x_on = |k: usize| if k == 0 && shifted_control { "W" } else { "X" }.to_string();
                    let control = (0..parties).map(x_on).collect();
                    let variations = (0..v)
                        .map(|i| (0..parties).map(|k| if slot[k] == i { x_on(k) } else { "Y".to_string() }).collect())
                        .collect();
                    let scenario = MerminScenario { group: group.clone(), parties, measurements, control, variations };
                    scenario.validate()?;
                    out.push(FamilyMember { scenario, pattern, multiplicity, twist, shifted_control });
                }
            }
        }
    }
    Ok(out)
}

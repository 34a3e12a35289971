// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{ObservableStructure, PhaseAngles};
use crate::algebra::{ravel, unravel, SemiTensor, C64};
use crate::error::{Error, Result};

/// Probabilities below this are treated as impossible outcomes.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// A joint distribution over `arity` systems with `outcomes` labels each,
/// stored row-major over outcome tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub arity: usize,
    pub outcomes: usize,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(arity: usize, outcomes: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != outcomes.pow(arity as u32) {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {arity} systems with {outcomes} outcomes",
                probabilities.len()
            )));
        }
        Ok(Self { arity, outcomes, probabilities })
    }

    fn dims(&self) -> Vec<usize> {
        vec![self.outcomes; self.arity]
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.probabilities[ravel(tuple, &self.dims())]
    }

    pub fn tuple(&self, index: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        unravel(index, &self.dims(), &mut t);
        t
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Outcome tuples with probability above [`SUPPORT_THRESHOLD`].
    pub fn support(&self) -> Vec<Vec<usize>> {
        (0..self.probabilities.len())
            .filter(|&i| self.probabilities[i] > SUPPORT_THRESHOLD)
            .map(|i| self.tuple(i))
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.arity != other.arity || self.outcomes != other.outcomes {
            return Err(Error::DimensionMismatch("distributions over different outcome spaces".into()));
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// The distribution with systems reordered: new system `k` is old
    /// system `perm[k]`.
    pub fn permute_parties(&self, perm: &[usize]) -> Self {
        let mut probabilities = vec![0.0; self.probabilities.len()];
        let mut new_tuple = vec![0; self.arity];
        for (i, &p) in self.probabilities.iter().enumerate() {
            let old = self.tuple(i);
            for (k, &src) in perm.iter().enumerate() {
                new_tuple[k] = old[src];
            }
            probabilities[ravel(&new_tuple, &self.dims())] = p;
        }
        Self { arity: self.arity, outcomes: self.outcomes, probabilities }
    }
}

/// Born-rule statistics of measuring every leg of `state` in the gray
/// observable's (normalised) classical points.
pub fn born_distribution(gray: &ObservableStructure, state: &SemiTensor) -> Result<OutcomeDistribution> {
    let d = gray.dim();
    if !state.in_dims().is_empty() || state.out_dims().iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch(format!("expected a state on copies of dimension {d}")));
    }
    let points = gray.classical_points()?;
    if points.len() != d {
        return Err(Error::PointsUnavailable(format!("{} has {} classical points, need {d}", gray.name(), points.len())));
    }
    // Rows are the normalised bras ⟨x_i|.
    let mut rows = Vec::with_capacity(d * d);
    for p in &points {
        let n = p.norm();
        rows.extend(p.data().iter().map(|x| x.conj() / n));
    }
    let projector = SemiTensor::new(gray.semiring(), vec![d], vec![d], rows)?;
    let mut amps = state.clone();
    for leg in 0..state.out_dims().len() {
        amps = amps.apply_to_output(leg, &projector)?;
    }
    let raw: Vec<f64> = amps.data().iter().map(C64::norm_sqr).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 1e-300) || !total.is_finite() {
        return Err(Error::NonNormalizable);
    }
    OutcomeDistribution::new(state.out_dims().len(), d, raw.into_iter().map(|p| p / total).collect())
}

/// Applies the phase `α` of the white structure to every leg of `state`
/// and measures in the gray classical points.
pub fn measurement_distribution(
    gray: &ObservableStructure,
    state: &SemiTensor,
    alpha: Option<(&ObservableStructure, &PhaseAngles)>,
) -> Result<OutcomeDistribution> {
    let rotated = match alpha {
        None => state.clone(),
        Some((white, theta)) => {
            let gate = white.phase_gate(&white.phase_from_angles(theta)?)?;
            let mut t = state.clone();
            for leg in 0..state.out_dims().len() {
                t = t.apply_to_output(leg, &gate)?;
            }
            t
        }
    };
    born_distribution(gray, &rotated)
}

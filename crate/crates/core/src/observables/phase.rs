// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;

use num_rational::Rational64;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::ObservableStructure;
use crate::algebra::{SemiTensor, C64};
use crate::error::{Error, Result};

/// Phases `θ_j = 2π r_j`, one per classical point, with `r_0 = 0`.
///
/// Entries are exact rationals reduced into `[0, 1)`, so sums of phases are
/// compared exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseAngles {
    turns: Vec<Rational64>,
}

fn reduce(r: Rational64) -> Rational64 {
    let one = Rational64::from_integer(1);
    let f = r - r.floor();
    if f >= one { f - one } else { f }
}

impl PhaseAngles {
    pub fn new(turns: Vec<Rational64>) -> Result<Self> {
        if turns.is_empty() {
            return Err(Error::Parse("phase vector is empty".into()));
        }
        let turns: Vec<Rational64> = turns.into_iter().map(reduce).collect();
        if turns[0] != Rational64::from_integer(0) {
            return Err(Error::Parse(format!("first phase must be 0, got {}", turns[0])));
        }
        Ok(Self { turns })
    }

    pub fn zero(dim: usize) -> Self {
        Self { turns: vec![Rational64::from_integer(0); dim.max(1)] }
    }

    /// Parses entries such as `"0"`, `"1/4"`, `"-2/9"`.
    pub fn parse(entries: &[&str]) -> Result<Self> {
        Self::new(entries.iter().map(|e| parse_rational(e)).collect::<Result<Vec<_>>>()?)
    }

    pub fn dim(&self) -> usize {
        self.turns.len()
    }

    pub fn turns(&self) -> &[Rational64] {
        &self.turns
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("phase vectors of length {} and {}", self.dim(), other.dim())));
        }
        Ok(Self { turns: self.turns.iter().zip(&other.turns).map(|(a, b)| reduce(a + b)).collect() })
    }

    pub fn neg(&self) -> Self {
        Self { turns: self.turns.iter().map(|a| reduce(-a)).collect() }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a PhaseAngles>>(dim: usize, items: I) -> Result<Self> {
        items.into_iter().try_fold(Self::zero(dim), |acc, x| acc.add(x))
    }

    pub fn is_zero(&self) -> bool {
        self.turns.iter().all(|r| *r == Rational64::from_integer(0))
    }

    /// `e^{2πi r_j}` for each entry.
    pub fn phases(&self) -> Vec<C64> {
        self.turns.iter().map(|r| turn_to_phase(*r)).collect()
    }
}

pub(crate) fn turn_to_phase(r: Rational64) -> C64 {
    let r = reduce(r);
    // Exact values on the quarter turns keep common cases free of rounding.
    let (n, d) = (*r.numer(), *r.denom());
    match (n, d) {
        (0, _) => C64::new(1.0, 0.0),
        (1, 4) => C64::new(0.0, 1.0),
        (1, 2) => C64::new(-1.0, 0.0),
        (3, 4) => C64::new(0.0, -1.0),
        _ => C64::from_polar(1.0, 2.0 * PI * (n as f64) / (d as f64)),
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for PhaseAngles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.turns.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for PhaseAngles {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.turns.iter().map(format_rational).collect();
        parts.serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTurn {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for PhaseAngles {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<RawTurn>::deserialize(deserializer)?;
        let turns = raw
            .into_iter()
            .map(|t| match t {
                RawTurn::Int(i) => Ok(Rational64::from_integer(i)),
                RawTurn::Text(s) => parse_rational(&s),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        PhaseAngles::new(turns).map_err(de::Error::custom)
    }
}

impl ObservableStructure {
    /// `Σ_j e^{2πi r_j} p_j` over the classical points.
    pub fn phase_from_angles(&self, theta: &PhaseAngles) -> Result<SemiTensor> {
        let pts = self.classical_points()?;
        if pts.len() != theta.dim() {
            return Err(Error::PointsUnavailable(format!(
                "{} has {} classical points but the phase vector has {} entries",
                self.name(),
                pts.len(),
                theta.dim()
            )));
        }
        let mut acc = SemiTensor::zeros(self.semiring(), vec![self.dim()], vec![]);
        for (p, w) in pts.iter().zip(theta.phases()) {
            acc = acc.add(&p.scale(w))?;
        }
        Ok(acc)
    }

    /// The (1,1) spider decorated by `ψ`.
    pub fn phase_gate(&self, psi: &SemiTensor) -> Result<SemiTensor> {
        self.left_mult_by(psi)
    }
}

/// `phase_from_angles` as a free function.
pub fn phase_from_angles(o: &ObservableStructure, theta: &PhaseAngles) -> Result<SemiTensor> {
    o.phase_from_angles(theta)
}

/// Whether `μ(ψ ⊗ ψ_*) = η`.
pub fn is_phase_point(o: &ObservableStructure, psi: &SemiTensor, tol: f64) -> bool {
    let check = || -> Result<f64> {
        let conj = o.lower_star_state(psi)?;
        let prod = o.multiply_states(psi, &conj)?;
        prod.max_abs_diff(o.unit())
    };
    match check() {
        Ok(r) if o.semiring().is_boolean() => r == 0.0,
        Ok(r) => r <= tol,
        Err(_) => false,
    }
}

pub(crate) fn is_unitary(u: &SemiTensor, tol: f64) -> bool {
    let id = SemiTensor::identity_on(u.semiring(), u.in_dims());
    let id_out = SemiTensor::identity_on(u.semiring(), u.out_dims());
    let a = u.dagger().compose(u).and_then(|x| x.max_abs_diff(&id));
    let b = u.compose(&u.dagger()).and_then(|x| x.max_abs_diff(&id_out));
    matches!((a, b), (Ok(x), Ok(y)) if x <= tol && y <= tol)
}

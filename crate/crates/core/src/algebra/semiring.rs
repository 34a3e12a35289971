// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

/// The scalar structure a tensor lives over.
///
/// Both variants store their entries as `C64`; boolean entries are kept in
/// `{0, 1}` (real part) and every operation renormalises after summing, so
/// addition behaves as `or` and multiplication as `and`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semiring {
    ComplexDouble,
    Boolean,
}

impl Semiring {
    pub fn zero(self) -> C64 {
        C64::new(0.0, 0.0)
    }

    pub fn one(self) -> C64 {
        C64::new(1.0, 0.0)
    }

    pub fn add(self, a: C64, b: C64) -> C64 {
        self.normalize(a + b)
    }

    pub fn mul(self, a: C64, b: C64) -> C64 {
        self.normalize(a * b)
    }

    /// Maps an accumulated sum back into the semiring's carrier.
    #[inline]
    pub fn normalize(self, x: C64) -> C64 {
        match self {
            Semiring::ComplexDouble => x,
            Semiring::Boolean => {
                if x.re > 0.5 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, Semiring::Boolean)
    }

    /// Involution used by the dagger: complex conjugation, or nothing for
    /// relations.
    #[inline]
    pub fn conj(self, x: C64) -> C64 {
        match self {
            Semiring::ComplexDouble => x.conj(),
            Semiring::Boolean => x,
        }
    }

    pub fn is_valid_entry(self, x: C64) -> bool {
        match self {
            Semiring::ComplexDouble => x.re.is_finite() && x.im.is_finite(),
            Semiring::Boolean => x.im == 0.0 && (x.re == 0.0 || x.re == 1.0),
        }
    }
}

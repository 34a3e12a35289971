// SPDX-License-Identifier: Apache-2.0

//! Dense tensors over a semiring, network contraction and finite abelian
//! groups.

mod contract;
mod group;
mod semiring;
mod tensor;

pub use contract::contract_network;
pub use group::{classify_table, FiniteAbelianGroup, GroupElement};
pub use semiring::{Semiring, C64};
pub use tensor::{Proportionality, SemiTensor};
pub(crate) use tensor::{ravel, unravel};

/// Default comparison tolerance for complex-valued checks.
pub const DEFAULT_TOL: f64 = 1e-9;

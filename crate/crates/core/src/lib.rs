// SPDX-License-Identifier: Apache-2.0

//! Strongly complementary observables in dagger-compact process theories.
//!
//! The crate evaluates observable structures and pairs of them as dense
//! tensors over the complex numbers or the booleans, rewrites two-colour
//! spider diagrams, and replays generalised Mermin arguments on GHZ states
//! against an exhaustive local-hidden-variable search.

pub mod algebra;
pub mod diagram;
pub mod error;
pub mod models;
pub mod nonlocality;
pub mod observables;
pub mod pairs;
pub mod report;

pub use algebra::{FiniteAbelianGroup, GroupElement, Semiring, SemiTensor, C64, DEFAULT_TOL};
pub use error::{Error, Result};
pub use nonlocality::{MerminScenario, CorrelationClass};
pub use observables::{ObservableStructure, PhaseAngles};
pub use pairs::{build_group_pair, ObservablePair, PairReport};
pub use report::EquationCheck;

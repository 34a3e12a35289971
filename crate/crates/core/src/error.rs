// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("semiring mismatch: {0:?} vs {1:?}")]
    SemiringMismatch(crate::algebra::Semiring, crate::algebra::Semiring),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("element {element:?} does not belong to {group}")]
    ElementMismatch { element: Vec<u64>, group: String },

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("classical point verification failed: {0}")]
    Verification(String),

    #[error("classical points not available: {0}")]
    PointsUnavailable(String),

    #[error("state cannot be normalised")]
    NonNormalizable,

    #[error("closure failure: {0}")]
    Closure(String),

    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("no rewrite match: {0}")]
    NoMatch(String),

    #[error("incompatible decorations: {0}")]
    IncompatibleDecorations(String),

    #[error("diagram outside the bialgebra fragment: {0}")]
    OutsideFragment(String),

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("missing outcome for setting {0}")]
    MissingSetting(String),

    #[error("search space of {size} hidden states exceeds the cap of {cap}")]
    SearchCapExceeded { size: f64, cap: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{0}` failed to load: {1}")]
    ModelLoad(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

//! Crate-wide error type.

use thiserror::Error;

use crate::combination::CombinationResult;

/// Everything that can go wrong while constructing or operating on
/// granular values. Verdicts ("noncombinable", "conflicting rows") are
/// data, not errors; only violated invariants and undefined operations
/// land here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("frame must have between 1 and {max} elements, got {got}")]
    FrameSize { got: usize, max: usize },

    #[error("duplicate frame element {0:?}")]
    DuplicateElement(String),

    #[error("unknown element {0:?}")]
    UnknownElement(String),

    #[error("granule must be a nonempty subset of the frame")]
    EmptyGranule,

    #[error("values belong to different frames")]
    FrameMismatch,

    #[error("{0:?} is not a valid rational (use \"p/q\" or a finite decimal)")]
    InvalidRational(String),

    #[error("mass {0} is not strictly positive")]
    NonPositiveMass(crate::Rational),

    #[error("masses sum to {0}, expected exactly 1")]
    MassNotOne(crate::Rational),

    #[error("credibility must lie in [0, 1], got {0}")]
    CredibilityRange(crate::Rational),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),

    #[error("relation must declare at least one column")]
    NoColumns,

    #[error("relation must have at least one row")]
    EmptyRelation,

    #[error("duplicate row id {0:?}")]
    DuplicateRowId(String),

    #[error("row {row:?} has no cell for column {column:?}")]
    MissingCell { row: String, column: String },

    #[error("row {row:?} has a cell for undeclared column {column:?}")]
    UnexpectedCell { row: String, column: String },

    #[error("relation is not conflict-free on the requested columns; offending rows: {}", row_ids.join(", "))]
    ConflictingRelation { row_ids: Vec<String> },

    /// K = 1: every focal pair is disjoint, so the normalized result does
    /// not exist. The unnormalized remainder (empty) and K itself ride
    /// along so callers can still report what happened.
    #[error("total conflict (K = 1); the combined evidence annihilates itself{}", step.map(|i| format!(" at input index {i}")).unwrap_or_default())]
    TotalConflict {
        partial: Box<CombinationResult>,
        /// For n-ary combination, the index of the input whose
        /// incorporation produced K = 1.
        step: Option<usize>,
    },

    #[error("cannot combine an empty sequence of distributions")]
    EmptyInput,

    #[error("witness relation would need {rows} rows, above the cap of {cap}")]
    WitnessTooLarge { rows: num_bigint::BigUint, cap: u64 },

    #[error("oracle is limited to {cap} focal elements per side, got {got}")]
    OracleTooLarge { got: usize, cap: usize },

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

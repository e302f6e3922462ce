use std::collections::BTreeSet;

use thiserror::Error;

/// Errors produced by validation, construction, and budget-gated operations.
///
/// Precondition violations on indices (out-of-range agent/resource arguments)
/// panic instead; `Error` is reserved for bad input data and exhausted budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation matrix is not square: {rows} rows but row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("relation must be over a nonempty domain")]
    EmptyDomain,

    #[error("totality violated at pair ({i}, {j}): neither {i} \u{2ab0} {j} nor {j} \u{2ab0} {i}")]
    TotalityViolation { i: usize, j: usize },

    #[error("transitivity violated at triple ({i}, {j}, {k}): {i} \u{2ab0} {j} and {j} \u{2ab0} {k} but not {i} \u{2ab0} {k}")]
    TransitivityViolation { i: usize, j: usize, k: usize },

    #[error("levels do not partition 0..{size}: index {index} {problem}")]
    BadLevels {
        size: usize,
        index: usize,
        problem: &'static str,
    },

    #[error("matrix entry at ({row}, {col}) is {value}, expected 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },

    #[error("matrix rows have inconsistent lengths: row {row} has {cols} entries, expected {expected}")]
    RaggedMatrix { row: usize, cols: usize, expected: usize },

    #[error("allocation column {column} has {ones} entries equal to 1, expected exactly one")]
    BadAllocationColumn { column: usize, ones: usize },

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("plausibility lifting violation: {0}")]
    Lifting(LiftingViolation),

    #[error("universe of {size} resources exceeds the limit of {max} for this check depth")]
    UniverseTooLarge { size: usize, max: usize },

    #[error("column {column} is already in good position")]
    ColumnAlreadyGood { column: usize },

    #[error("deals do not chain: {detail}")]
    ComposeMismatch { detail: String },

    #[error("allocation is not good: column {column} is not in good position")]
    NotGood { column: usize },

    #[error("enumeration budget exceeded: instance has {required} allocations, budget allows {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("duplicate name {0:?}")]
    DuplicateName(String),

    #[error("unknown name {0:?}")]
    UnknownName(String),

    #[error("invalid problem file: {0}")]
    Parse(String),
}

/// Witness that a plausibility relation breaks positivity or does not extend
/// the base resource order on singletons.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LiftingViolation {
    pub law: String,
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
}

impl std::fmt::Display for LiftingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (left = {:?}, right = {:?})",
            self.law, self.left, self.right
        )
    }
}

use thiserror::Error;

use crate::trees::Split;

/// Errors raised by the library. Empty intersections and unbalanced
/// weightings are values, not errors.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parts sum to {sum}, expected {top}")]
    PartsMismatch { top: u32, sum: u64 },
    #[error("a marked set needs between 3 and 64 labels, got {0}")]
    InvalidGround(u32),
    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: u32, n: u32 },
    #[error("unstable split: side {{{side}}} leaves fewer than two labels on one side (n = {n})")]
    UnstableSplit { side: String, n: u32 },
    #[error("malformed split text {0:?}")]
    MalformedSplit(String),
    #[error("incompatible splits {0} and {1}")]
    IncompatibleSplits(Split, Split),
    #[error("edge {0} is not an internal edge of the tree")]
    NotInternalEdge(usize),
    #[error("n = {n} exceeds the supported maximum {max}")]
    TooLarge { n: u32, max: u32 },
    #[error("n = {n} is below the supported minimum {min}")]
    TooSmall { n: u32, min: u32 },
    #[error("ground sets differ: n = {left} vs n = {right}")]
    GroundMismatch { left: u32, right: u32 },
    #[error("no strata given")]
    NoStrata,
    #[error("edge condition fails: split {0} of the tree is incompatible with the divisor")]
    EdgeConditionFails(Split),
    #[error("total degree {degree} differs from dim = n - 3 = {expected}; only dimension-zero products are evaluated")]
    DegreeMismatch { degree: u64, expected: u32 },
    #[error("dimension unbalanced: edge weights plus psi weights = {weights}, vertex dimensions = {dims}")]
    DimensionUnbalanced { weights: u64, dims: u64 },
    #[error("decoration has {got} edge weights for {expected} internal edges")]
    WeightCountMismatch { got: usize, expected: usize },
    #[error("no balanced weighting exists")]
    NoBalanceGiven,
    #[error("expansion budget exceeded: total edge weight {total} > {budget}")]
    BudgetExceeded { total: u64, budget: u64 },
    #[error("factorial ratio {numerator} / {denominator} is not integral")]
    RatioNotIntegral {
        numerator: String,
        denominator: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

use crate::dilation_data::ConditionReport;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: {left:?} vs {right:?}")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix with {rows}x{cols} shape given {entries} entries")]
    EntryCount {
        rows: usize,
        cols: usize,
        entries: usize,
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("tolerance must be positive and finite, got {atol}")]
    InvalidTolerance { atol: f64 },

    #[error("matrix is not Hermitian: residual {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is indefinite: eigenvalue {min_eigenvalue:.3e}")]
    IndefiniteMatrix { min_eigenvalue: f64 },

    #[error("empty tuple")]
    EmptyTuple,

    #[error("operators {i} and {j} do not commute: residual {residual:.3e}")]
    NotCommuting { i: usize, j: usize, residual: f64 },

    #[error("operator {index} is not a contraction: norm {norm:.12}")]
    NotContractive { index: usize, norm: f64 },

    #[error("subset enumeration over {n} operators exceeds the limit of {limit}")]
    TooManyOperators { n: usize, limit: usize },

    #[error("invalid index set: {reason}")]
    InvalidSubset { reason: String },

    #[error("dilation data lives on the {found} space, expected {expected}")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },

    #[error("condition {} fails: residual {:.3e}", .0.condition_id, .0.residual)]
    ConditionsNotMet(Box<ConditionReport>),

    #[error("model data fails {condition}: residual {residual:.3e}")]
    InvalidModelData { condition: String, residual: f64 },

    #[error("I - zT* is singular at z = {re} + {im}i")]
    SingularResolvent { re: f64, im: f64 },

    #[error("contraction is not C.0: spectral radius {spectral_radius:.12}")]
    NotC0 { spectral_radius: f64 },

    #[error("no truncation degree up to {max} brings the tail below {target:.1e}: got {achieved:.3e}")]
    TruncationTooLarge {
        max: usize,
        target: f64,
        achieved: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

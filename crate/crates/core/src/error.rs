use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular (condition estimate {cond:.3e} > {limit:.3e})")]
    SingularMatrix { cond: f64, limit: f64 },

    #[error("jet order {requested} exceeds the cap {max}")]
    OrderExceeded { requested: usize, max: usize },

    #[error("jets are expanded about different centers")]
    CenterMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("argument {value} outside the domain of {primitive}")]
    DomainError { primitive: String, value: f64 },

    #[error("point ({0}, {1}) lies outside the closed unit disk")]
    OutsideDisk(f64, f64),

    #[error("series product would need powers below nu^-1")]
    TruncationUnderflow,

    #[error("leading coefficient is not invertible")]
    NotInvertible,

    #[error("series is not unipotent: {0}")]
    NotUnipotent(String),

    #[error("zeroth-order coefficient is singular somewhere on the disk")]
    SingularZerothOrder,

    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },

    #[error("element is not flat at the boundary: {0}")]
    BoundaryNotFlat(String),

    #[error("element is not in DG: {0}")]
    NotInDG(String),

    #[error("path leaves the group of boundary-identity maps: {0}")]
    PathNotInG(String),

    #[error("nu^-1 Laurent term does not vanish (|residual| = {0:.3e})")]
    LaurentObstruction(f64),

    #[error("boundary loops do not commute pointwise (max residual {0:.3e})")]
    BoundaryNotCommuting(f64),

    #[error("loop slice is not unitary (residual {0:.3e})")]
    NonUnitarySlice(f64),

    #[error("invalid spin {0}: 2j must be a nonnegative integer")]
    InvalidSpin(f64),

    #[error("truncated operator size {size} exceeds the limit {limit}")]
    CutoffTooLarge { size: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

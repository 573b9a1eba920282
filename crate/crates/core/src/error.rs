use thiserror::Error;

/// Errors raised by algebra, module, operator and frame computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not hermitian")]
    NotHermitian,
    #[error("not positive")]
    NotPositive,
    #[error("not invertible")]
    NotInvertible,
    #[error("not a frame")]
    NotAFrame,
    #[error("not a g-frame")]
    NotAGFrame,
    #[error("bound not strictly nonzero")]
    BoundNotStrictlyNonzero,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("range not included")]
    RangeNotIncluded,
    #[error("δ = 0")]
    DeltaZero,
    #[error("Bessel bound too large: ξ = {xi} is not below ν = {nu}")]
    BesselBoundTooLarge { xi: f64, nu: f64 },
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;

/// Errors raised by the reduction engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible field descriptors")]
    IncompatibleFields,
    #[error("sign requested for a non-real element")]
    SignOfComplex,
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("polynomial of degree {degree} exceeds the factorization cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("zero jet is not invertible")]
    ZeroJet,
    #[error("zero system")]
    ZeroSystem,
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("insufficient precision: need relative order {required}, have {available}")]
    InsufficientPrecision { required: i64, available: i64 },
    #[error("polynomials are not coprime")]
    NotCoprime,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),
    #[error("Sylvester operands share an eigenvalue")]
    CommonEigenvalue,
    #[error("matrix is not in the image of the complex block embedding")]
    NotCMatrix,
    #[error("imaginary part must be nonzero")]
    BZero,
    #[error("residual matrix is resonant: {0}")]
    ResonantResidual(String),
    #[error("wrong spectrum: {0}")]
    WrongSpectrum(String),
    #[error("spectra are not disjoint")]
    SpectraNotDisjoint,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid transform step: {0}")]
    InvalidStep(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by walk construction, evolution and the quantumness measures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coin matrix is not unitary (max |U^dagger U - I| = {0:e})")]
    NonUnitary(f64),

    #[error("parameter `{name}` = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("coin state is not pure")]
    NonPureCoin,

    #[error("Kraus operators are not complete (max |sum K^dagger K - I| = {0:e})")]
    IncompleteKraus(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("hypergeometric series does not terminate (a = {a}, b = {b})")]
    NonTerminating { a: i64, b: i64 },

    #[error("hypergeometric parameter c = {0} must be a positive integer")]
    InvalidC(i64),

    #[error("coin is singular for the closed form (|U00 U11| = {diag:e}, |U01 U10| = {off:e})")]
    SingularCoin { diag: f64, off: f64 },

    #[error("mean {mean} outside [-{tau}, {tau}]")]
    MeanOutOfRange { mean: f64, tau: usize },

    #[error("theta = 0 makes the asymptotic bias formula undefined")]
    ThetaZero,

    #[error("{what}: {lhs} vs {rhs} differ by more than {tol:e}")]
    IdentityViolation {
        what: &'static str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

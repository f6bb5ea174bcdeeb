use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("gram matrix is not symmetric positive-definite: {0}")]
    InvalidGram(String),

    #[error("basis is rank deficient: rank {rank} < {columns} columns")]
    RankDeficient { rank: usize, columns: usize },

    #[error("trace map {map} is not surjective: rank deficit {deficit}")]
    NotSurjective { map: &'static str, deficit: usize },

    #[error("operator is not skew-symmetric-like: residual {residual:.3e} > {tolerance:.3e}")]
    NotSkew { residual: f64, tolerance: f64 },

    #[error("abstract Green identity violated: residual {residual:.3e} > {tolerance:.3e}")]
    GreenIdentity { residual: f64, tolerance: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid coefficient field `{name}`: {reason}")]
    InvalidCoefficient { name: String, reason: String },

    #[error("resistive map is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    IndefiniteResistance { min_eigenvalue: f64 },

    #[error("constitutive map is not symmetric positive-definite: {0}")]
    InvalidConstitutive(String),

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("power balance violated at step {step}: residual {residual:.3e} > {tolerance:.3e}")]
    BalanceViolation {
        step: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot parse error at line {line}: {reason}")]
    Snapshot { line: usize, reason: String },
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}

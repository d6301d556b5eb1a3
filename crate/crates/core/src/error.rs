use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator vanishes: {0}")]
    DenominatorVanishes(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is singular")]
    Singular,

    #[error("index length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Pochhammer pole: c_{k} + {n} = 0")]
    PochhammerPole { k: usize, n: usize },

    #[error("Gamma pole at {0}")]
    GammaPole(String),

    #[error("rank ambiguous: residual {residual:e} inside tolerance band [{low:e}, {high:e}]")]
    RankToleranceAmbiguous { residual: f64, low: f64, high: f64 },

    #[error("more than one irreducibility condition fails; no invariant subspace is constructed")]
    MultipleFailures,

    #[error("no invariant subspace: {0}")]
    NoInvariantSubspace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

//! Error type shared by all modules.

use thiserror::Error;

/// Coarse failure class, used by callers that need to distinguish bad input
/// from a numerical breakdown (the CLI maps these to exit codes 2 and 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input violated a precondition.
    Validation,
    /// The computation itself failed or produced inconsistent results.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (residual {residual:.3e} exceeds tol {tol:.3e})")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds tol {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("{0} requires a prime dimension, got {1}")]
    NotPrime(&'static str, usize),

    #[error("known eigenvalues inconsistent: eigenspace for {eigenvalue} has dimension {found}, expected {expected}")]
    EigenvalueInconsistent {
        eigenvalue: String,
        found: usize,
        expected: usize,
    },

    #[error("matrices are not Weyl-commuting: no exponent j satisfies AB = z^j BA within tol {tol:.3e}")]
    NotWeylCommuting { tol: f64 },

    #[error("ambiguous commutation exponent (candidates {first} and {second} both pass): tolerance {tol:.3e} too loose")]
    AmbiguousCommutation { first: usize, second: usize, tol: f64 },

    #[error("reducible pair: gcd({j}, {n}) = {gcd} > 1")]
    ReduciblePair { j: usize, n: usize, gcd: usize },

    #[error("pair commutes (j = 0); no canonical form exists")]
    CommutingPair,

    #[error("invalid projector set: {0}")]
    InvalidSet(String),

    #[error("duplicate projector: vectors {first} and {second} define the same rank-1 projector")]
    DuplicateProjector { first: usize, second: usize },

    #[error("set is not representative: measurement-map rank {rank} < {required}")]
    NotRepresentative { rank: usize, required: usize },

    #[error("operation requires a declared grouping: {0}")]
    GroupingRequired(String),

    #[error("grouping is not disjoint: {0}")]
    NonDisjointGrouping(String),

    #[error("vector {0} belongs to no declared basis")]
    VectorWithoutBasis(usize),

    #[error("set was not produced by mub-prime (provenance: {0:?})")]
    NotMubSet(String),

    #[error("set carries no tensor-product structure; build it with compose")]
    NotProductSet,

    #[error("linear program infeasible: internal inconsistency ({0})")]
    LpInfeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid JSON: {0}")]
    Json(String),
}

impl Error {
    /// Which coarse class this failure belongs to.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EigenvalueInconsistent { .. }
            | Error::AmbiguousCommutation { .. }
            | Error::LpInfeasible(_)
            | Error::Numerical(_) => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

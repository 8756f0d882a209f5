use thiserror::Error;

use crate::specfun::Pole;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("matrix is singular within tolerance (p={p}, q={q}, {zero} zero eigenvalues)")]
    Singular { p: usize, q: usize, zero: usize },
    #[error("matrix is not positive definite (signature p={p}, q={q}, {zero} zero eigenvalues)")]
    NotPositiveDefinite { p: usize, q: usize, zero: usize },
    #[error("point does not lie in an open orbit: {0}")]
    NotOpen(String),
    #[error("d ≤ n required (got n={n}, d={d}); for d > n the second invariant vanishes identically")]
    DimensionOrder { n: usize, d: usize },
    #[error("expansion refused: {0}")]
    TooLarge(String),
    #[error("Bernstein-Sato identity violated: {0}")]
    IdentityViolated(String),
    #[error("pole: {0}")]
    Pole(Pole),
    #[error("parameters outside the convergence region: {0}")]
    Convergence(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("branch tracking failed: {0}")]
    Branch(String),
    #[error("invalid orbit parameter: {0}")]
    InvalidOrbit(String),
}

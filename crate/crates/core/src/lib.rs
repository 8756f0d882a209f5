//! Exact and numerical verification toolkit for the two-variable zeta
//! distribution on the enhanced positive symmetric cone
//! `Ω̃ = Sym_n^+(R) × M°_{n,d}(R)`.

pub mod error;
pub mod functional_eq;
pub mod invariants;
pub mod linalg;
pub mod polyalg;
pub mod report;
pub mod specfun;
pub mod zeta_num;

pub use error::{Error, Result};

//! Exact computational kernel over prime fields: scalars, dense matrices,
//! univariate and trivariate polynomials, truncated power series.
//!
//! Everything here is deterministic. Randomized root splitting in
//! [`UniPoly::roots`] runs from a fixed internal seed.

mod gf;
mod matrix;
mod poly;
mod series;
mod unipoly;

pub use gf::{is_prime, PrimeField, DEFAULT_PRIME};
pub use matrix::DenseMatrix;
pub use poly::{resultant, Exps, Poly, VAR_NAMES};
pub use series::{series_compose, Series};
pub use unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^32")]
    ModulusTooLarge(u64),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

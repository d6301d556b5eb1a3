//! Generators of the monodromy group of the F_C hypergeometric system in
//! m variables, as explicit 2^m × 2^m matrices.
//!
//! Matrices are built over an exact field of rational functions in
//! α, β, γ₁ … γₘ or numerically at a parameter point, then checked against
//! the relations they satisfy. Reducible parameters are classified and
//! witnessed by the dimension of the generated algebra; the series module
//! evaluates the local solutions.

pub mod classify;
pub mod error;
pub mod export;
pub mod indexing;
pub mod matrix;
pub mod monodromy;
pub mod params;
pub mod scalars;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use indexing::BinaryIndex;
pub use matrix::{ColumnVector, SquareMatrix};
pub use monodromy::{Basis, LoopWord};
pub use params::{Param, ParameterPoint};
pub use scalars::{ExactScalar, Generators, PairedScalar, Scalar, DEFAULT_TOL};

//! Scalars (exact rationals or tolerance-compared floats) and the dense linear
//! algebra used by every later stage.

pub mod linalg;
pub mod matrix;
pub mod scalar;

pub use linalg::{
    echelon, in_row_space, inverse, rank, row_space_basis, solve, split_idempotent, Echelon,
    Splitting,
};
pub use matrix::{dot, vec_mul, Matrix};
pub use scalar::{Mode, Rational, Scalar, Tolerance, DEFAULT_EPSILON};

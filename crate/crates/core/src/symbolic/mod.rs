//! Exact symbolic substrate: Gaussian rationals, polynomials, rational functions, matrices.

pub mod gaussian;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod ratfun;

pub use gaussian::GaussianRational;
pub use matrix::{ExactMatrix, ExactRing, Matrix, PolyMatrix, SymbolicMatrix};
pub use parse::{parse_polynomial, parse_with_vars};
pub use poly::{vars_of, Monomial, Polynomial, Vars};
pub use ratfun::RationalFunction;

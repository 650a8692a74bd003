//! Landau singularities of quadratic and Feynman integrals: symbolic construction of
//! Landau systems, Q-regularization, numeric membership probes and Hopf-algebraic
//! renormalization.

pub mod error;
pub mod fixtures;
pub mod graph;
pub mod landau;
pub mod point;
pub mod quadform;
pub mod regularize;
pub mod renorm;
pub mod solver;
pub mod symbolic;

pub use error::{Error, ParseError, Result, SymbolicError};
pub use symbolic::{GaussianRational, Matrix, PolyMatrix, Polynomial, RationalFunction, SymbolicMatrix, Vars};

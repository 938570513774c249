//! Cyclotomic Gaudin models for the classical simple Lie algebras: exact
//! construction of the commuting quadratic Hamiltonians twisted by a
//! finite-order automorphism, numerical solution of the cyclotomic Bethe
//! equations, closed-form Bethe vectors, and an exact identity suite run in
//! cyclotomic-rational arithmetic.

pub mod exact;
pub mod linalg;
pub mod par;
pub mod scalar;

pub mod autom;
pub mod bethe;
pub mod cli;
pub mod eig;
pub mod hamiltonians;
pub mod lie;
pub mod ratfun;
pub mod repn;
pub mod weight_function;

pub use exact::{Cyclo, CycloCtx, Rational};
pub use lie::{Gen, LieAlgebra, LieElement, Series, Weight};
pub use scalar::Scalar;

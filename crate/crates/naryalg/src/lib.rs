//! Exact-arithmetic calculus for n-ary graded associative and Lie algebras.
//!
//! Finite-dimensional multigraded vector spaces over exact rationals, with
//! the insertion (j-) product and its bracket, the graded alternator and
//! wedge bracket, structure checkers and module/extension builders,
//! Hochschild and Chevalley-Eilenberg cohomology, Hochschild operators on a
//! truncated tensor algebra, Filippov-bracket calculus, and polynomial
//! Nambu brackets. Every sign and combinatorial factor is validated against
//! brute-force oracles in the test suite.

pub mod cohomology;
pub mod error;
pub mod examples;
pub mod filippov;
pub mod format;
pub mod grading;
pub mod linalg;
pub mod multilinear;
pub mod nambu;
pub mod scalar;
pub mod tensorcalc;
pub mod structures;

pub use error::{Error, Result};

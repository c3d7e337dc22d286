//! Arithmetic over F_2 and F_3 and their extensions, and packed linear algebra.

pub mod field;
pub mod matrix;
pub mod subspace;
pub mod vector;

pub use field::{CoordinateSystem, FieldCtx, FieldElement};
pub use matrix::{rank_of, MatrixGF};
pub use subspace::Subspace;
pub use vector::{low_mask, Prime, Vector};

//! Additive rank-metric codes over F_2 and F_3.

pub mod codes;
pub mod constructions;
pub mod equivalence;
pub mod catalog;
pub mod classifier;
pub mod error;
pub mod gf;
pub mod report;
pub mod spread;
mod util;

pub use error::{Error, Result};
pub use util::stable_hash;

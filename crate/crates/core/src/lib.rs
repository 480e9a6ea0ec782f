//! Numerical engine for truncated Moyal star products on the unit disk and
//! the loop-group central extensions built from them.

pub mod determinant;
pub mod disk;
pub mod current;
pub mod error;
pub mod higher_dim;
pub mod jets;
pub mod matrix;
pub mod series;
pub mod topology;

pub use error::{Error, Result};
pub use matrix::{MatrixNC, C64};

//! The deformed algebra of matrix functions on the unit disk: Moyal star
//! product, star inverse and exponential, and the trace functionals.

mod algebra;
pub mod builders;
mod element;
mod moyal;
mod quadrature;
pub mod random;

pub use algebra::{DiskAlgebra, DiskSettings};
pub use element::{BoundaryClass, StarElement};
pub use moyal::{moyal_coefficient, MoyalProduct};
pub use quadrature::{gauss_legendre, pairwise_sum, DiskQuadrature};

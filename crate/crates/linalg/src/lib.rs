//! Exact linear algebra over ℤ and ℚ.
//!
//! Integer matrices, Hermite and Smith normal forms, lattices in ℤⁿ with
//! saturation, sums, intersections, generalized indices and quotient invariants,
//! plus multimodular rational kernels and solves.

pub mod error;
pub mod factor;
pub mod hnf;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod multimodular;
pub mod snf;

pub use error::{LinalgError, Result};
pub use lattice::{
    generalized_index, lattice_sum, left_kernel_integer, quotient_invariants, quotient_order, saturate,
    IntegerLattice,
};
pub use matrix::IntegerMatrix;
pub use modp::ModMatrix;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use snf::{invariant_factors, smith_normal_form};

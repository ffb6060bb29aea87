//! Exact linear algebra over Gaussian rationals: scalars, sparse matrices,
//! and canonical (reduced-echelon) subspaces. Everything downstream — algebra
//! axioms, idempotent extraction, integral solving, antipode construction —
//! reduces to the solvers in this module.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::{Matrix, SparseVec};
pub use scalar::Scalar;
pub use subspace::{
    image_basis, kernel_basis, rank, restricted_inverse, solve_linear, subspace_equal, Echelon,
    Insert, Subspace,
};

//! Exact-arithmetic toolkit for weak multiplier bialgebras.
//!
//! The library represents finite-dimensional algebras by structure constants
//! over the Gaussian rationals, coproducts by their multiplier actions on the
//! tensor square, and verifies — with zero numerical tolerance — the axioms
//! of a weak multiplier bialgebra: it finds the canonical idempotent,
//! extracts its separability structure, solves for invariant functionals
//! (integrals), and then constructively recovers the counit and a bijective
//! antipode from the integrals, cross-checking two independent construction
//! routes along with every identity the theory asserts.
//!
//! Module layout, bottom up:
//! - [`exact_linalg`]: scalars, sparse matrices, canonical subspaces, solvers;
//! - [`algebra_core`]: structure-constant algebras, multipliers, tensor squares;
//! - [`coproduct`]: coproducts, the canonical idempotent, canonical maps T₁–T₄;
//! - [`separability`]: legs of E, antipodal maps, distinguished functionals,
//!   modular automorphisms, the F-multipliers;
//! - [`integrals`]: invariant functionals and faithfulness;
//! - [`larson_sweedler`]: range/kernel theorems, counit and antipode
//!   construction, and the full verification pipeline;
//! - [`groupoids`]: groupoid-algebra and function-algebra generators with
//!   closed-form expected answers;
//! - [`cli`]: the text serialization format and command dispatch.

// Index arithmetic over basis positions is the natural idiom for
// structure-constant computations; iterator rewrites obscure it.
#![allow(clippy::needless_range_loop)]

pub mod algebra_core;
pub mod cli;
pub mod coproduct;
pub mod error;
pub mod exact_linalg;
pub mod groupoids;
pub mod integrals;
pub mod larson_sweedler;
pub mod separability;

pub use error::{Error, Result};

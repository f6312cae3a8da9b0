//! Naturally reductive two-step nilpotent metric Lie algebras.
//!
//! This crate builds two-step nilpotent metric Lie algebras from orthogonal
//! representations of compact Lie algebras, computes their isometry and
//! isotropy data, determines the index and distribution of symmetry, and
//! machine-checks that the symmetry directions at the identity coincide with
//! the fixed set of the isotropy and with the center of the acting algebra.
//!
//! Modules, bottom up:
//!
//! - [`linalg`] - tolerance-aware dense kernels (nullspaces, subspace
//!   comparison, Gram orthonormalization, eigenvalue clustering).
//! - [`liealg`] - metric Lie algebras from structure constants: center,
//!   derived subalgebra, nilpotency, Killing form, compact splitting.
//! - [`rep`] - orthogonal representations: validation, skew intertwiners,
//!   irreducible decomposition, central complex structures.
//! - [`nilbuild`] - the construction of the two-step algebra `g + V` from a
//!   representation, with its certification.
//! - [`isometry`] - orthogonal derivations (isotropy algebra), covariant
//!   derivatives, and the space of Killing fields parallel at the identity.
//! - [`symmetry`] - index/distribution of symmetry, theorem verification,
//!   quotient by the foliation of symmetry.
//! - [`catalog`] - built-in parameterized example inputs.
//! - [`cli`] - JSON input/report formats and the analysis entry point used
//!   by the `nilsym` binary.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod isometry;
pub mod liealg;
pub mod linalg;
pub mod nilbuild;
pub mod rep;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{SubspaceBasis, DEFAULT_TOL};

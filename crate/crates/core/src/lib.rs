//! Exact-arithmetic toolkit for finite-dimensional Lie algebras presented as
//! quadratic codifferentials on the exterior coalgebra of the underlying
//! vector space.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalars`]: the coefficient tower (rationals, polynomials in
//!   deformation parameters, rational functions).
//! * [`exterior`]: combinatorics of the exterior coalgebra (basis indexing,
//!   unshuffles, comultiplication).
//! * [`linalg`]: dense exact matrices with fraction-free elimination.
//! * [`coder`]: coderivations, their graded bracket, and Jacobi
//!   certification.
//! * [`cohomology`]: coboundary operators, cohomology dimensions and
//!   harmonic/coboundary/complement splittings.
//! * [`classify3`]: equivalence of three-dimensional structures, canonical
//!   representatives and explicit change-of-basis witnesses.
//! * [`deform`]: infinitesimal and miniversal deformations, branch analysis
//!   and the stratification graph of the three-dimensional moduli space.
//! * [`catalog`]: the built-in three-dimensional structures and the prebasis
//!   fixtures used to pin presentations in tests and reports.
//!
//! Everything is computed over exact rationals; no floating point is used
//! anywhere.

pub mod catalog;
pub mod classify3;
pub mod coder;
pub mod cohomology;
pub mod deform;
pub mod exterior;
pub mod linalg;
pub mod scalars;


pub use coder::{Coderivation, Codifferential};
pub use scalars::{MultiPoly, ParamName, RatFun, Rational, Scalar};

/// Largest vector-space dimension the desk-scale guards accept.
///
/// The combinatorial layers work for any dimension, but sizes grow as
/// `N * C(N, k)`, so callers that ingest user input should refuse anything
/// larger than this.
pub const MAX_DIM: usize = 8;

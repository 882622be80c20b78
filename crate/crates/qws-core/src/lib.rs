//! Coined quantum walks on finite graphs.
//!
//! The crate builds evolution operators `U = SC` on the arc space of a finite
//! multigraph, the boundary operator `K` and discriminant `T = K*SK` for coins
//! whose local spectra consist of two points, and lifts the spectrum of `T` to
//! the spectrum of `U`. Every lifted quantity can be compared against a dense
//! eigendecomposition of `U`.
//!
//! Conventions shared by all modules:
//!
//! * operators act on column vectors; entry `(r, c)` of a matrix is `<δ_r, X δ_c>`;
//! * arcs are dense indices; edge `i` owns arcs `2i` and `2i + 1`, which are
//!   mutually inverse;
//! * matrices are dense `faer::Mat<c64>`.

// `!(x <= tol)` so that NaN fails every tolerance check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coins;
pub mod discriminant;
pub mod error;
pub mod graph;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod sample;
pub mod spectral;
pub mod verify;
pub mod walk;

pub use error::{Error, ErrorClass, Result};
pub use faer::c64;

/// Dense complex matrix.
pub type CMat = faer::Mat<c64>;
/// Dense complex column vector.
pub type CVec = faer::Col<c64>;

/// Default clustering tolerance for eigenvalues.
pub const TOL_CLUSTER: f64 = 1e-8;
/// Default tolerance on eigenvector residuals.
pub const TOL_RESIDUAL: f64 = 1e-9;

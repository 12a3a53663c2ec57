//! Finite-stage universal Taylor series on convex domains of `C^n`.
//!
//! The crate builds coefficient prefixes of a power series centred at a point
//! of a convex domain `Ω`. Along an admissible sequence of truncation ranks the
//! partial sums approximate prescribed polynomials on convex compact sets
//! outside `Ω`, while every appended block stays small on an exhausting
//! sequence of compacts inside `Ω`. Every claim a build makes is re-checked by
//! the [`verify`] module on independent, finer point clouds.
//!
//! Layout:
//! - [`multiindex`]: enumerations of `N^n` and admissible rank sets.
//! - [`polynomial`]: sparse multivariate polynomials in a centred, scaled basis.
//! - [`lpsolve`]: dense two-phase simplex and the facet encoding of `|w| ≤ b`.
//! - [`convexgeom`]: convex bodies/domains, separation certificates, sampling.
//! - [`dualapprox`]: "small on L, close to P on K" polynomial blocks.
//! - [`universal`]: the staged builder.
//! - [`verify`]: independent fine-grid verification.
//! - [`scenario`], [`artifact`], [`report`], [`cli`]: file formats and front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod cli;
pub mod convexgeom;
pub mod dualapprox;
mod error;
pub mod lpsolve;
pub mod multiindex;
pub mod polynomial;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod universal;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Acceptance slack on fine grids: a bound `b` passes against `ε` iff
/// `b ≤ ε · 1.05 / cos(π/16)`.
pub fn acceptance_slack() -> f64 {
    1.05 / (std::f64::consts::PI / 16.0).cos()
}

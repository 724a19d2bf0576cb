//! Numerics for U(n)-invariant complex Finsler metrics on domains in C^n.
//!
//! Any such metric takes the form `F(z, v) = sqrt(r * phi(t, s))` with
//! `r = |v|^2`, `t = |z|^2`, `s = |<z, v>|^2 / |v|^2`, and every geometric
//! quantity reduces to closed forms in `phi` and its first two partials.
//! This crate implements those closed forms together with the independent
//! numerical oracles that certify them:
//!
//! - [`jet`]: second-order forward-mode jets supplying the `phi` partials;
//! - [`expr`] / [`metric`]: a small expression language for `phi(t, s)`
//!   and the catalog of named metrics with their domain guards;
//! - [`geometry`]: the complex/real coordinate bridge, scalar invariants,
//!   and the derivative suite of `s`;
//! - [`tensors`]: Levi matrix, real fundamental tensor, closed-form
//!   inverse and spectra, pseudoconvexity/convexity verdicts;
//! - [`dynamics`]: geodesic spray coefficients (three assembly routes),
//!   RK4 geodesic traces, Berwald rigidity residuals, and the unit-sphere
//!   polygonal-length experiment;
//! - [`curvature`]: the complex spray and holomorphic sectional curvature
//!   by closed form and by definitional contraction;
//! - [`linalg`]: in-repo Jacobi eigensolver and Gauss-Jordan inverse used
//!   as oracles.

pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod output;
pub mod parallel;
pub mod sample;
pub mod tensors;

pub use error::{Error, Result};
pub use expr::Expr;
pub use geometry::PointDirection;
pub use jet::Jet2;
pub use metric::{catalog, lookup, resolve, DomainGuard, MetricDefn};
pub use tensors::{ConvexityReport, ScalarData, Verdict};

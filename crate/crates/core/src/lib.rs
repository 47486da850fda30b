//! Numerical toolkit for complex-hyperbolic Picard varieties.
//!
//! The crate covers the ball and hyperquadric models of complex hyperbolic
//! space, the Heisenberg stabilizer of the cusp at infinity, Poincare-series
//! Bergman kernels evaluated in the log domain, the Bergman-metric matrix and
//! its determinant, and the regression harness used to measure growth
//! exponents in the weight `k`.
//!
//! Every sum that can span thousands of orders of magnitude is reduced with a
//! max-shifted, fixed-tree pairwise reduction so that results are identical
//! regardless of the number of rayon worker threads.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod logdomain;
pub mod metric;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Which constants to use where the printed formulas disagree with numerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErratumMode {
    /// Numerically verified constants (default).
    #[default]
    Corrected,
    /// Constants exactly as printed.
    PaperLiteral,
}

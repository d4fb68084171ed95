//! Maximum-entropy Edgeworth estimates for the number of integer points in
//! transportation polytopes and degree-sequence polytopes.
//!
//! The number of non-negative integer `m × n` tables with given margins (or
//! labeled simple graphs with a given degree sequence) is written as
//! `P{S = s} · exp(I(P))`, where `P` is the maximum-entropy product
//! distribution whose expected margins equal the targets and `I(P)` its
//! entropy. `P{S = s}` is then approximated by a Gaussian local limit
//! estimate multiplied by the Edgeworth factor `exp(-κ³/72 + κ⁴/24)`.
//!
//! Modules:
//!
//! - [`maxent`]: dual Newton fits for geometric (tables) and Bernoulli (graphs) cells.
//! - [`moments`]: covariance of the margin vector, log-determinant, Wick sums for κ³ and κ⁴.
//! - [`estimator`]: assembly of the Gaussian and Edgeworth log counts, plus diagnostics.
//! - [`oracle`]: exact big-integer counters, characteristic-function quadrature, Monte Carlo moments.

pub mod error;
pub mod estimator;
mod linalg;
pub mod maxent;
pub mod moments;
pub mod oracle;

pub use error::{Error, Result};
pub use estimator::{
    estimate_equal_margins, estimate_graph, estimate_table, gaussian_only, CountReport,
    Diagnostic, DiagnosticKind, ModelKind,
};
pub use maxent::{
    fit_graph, fit_table, BernoulliFit, DegreeSpec, GeometricFit, MarginSpec, SolverOptions,
};
pub use moments::{CovarianceModel, CumulantSummary, EdgeCoefficients, PairCovariance};

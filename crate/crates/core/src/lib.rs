//! Hermite–Hadamard bounds on simplices.
//!
//! For a convex function `f` on an `n`-simplex `T` with barycenter `b`,
//!
//! ```text
//! f(b) <= (1/|T|) int_T f <= (f(v_0) + ... + f(v_n)) / (n+1) = M
//! ```
//!
//! and the two gaps `L` (left) and `R` (right) satisfy `0 <= L <= n R`, with
//! `n` the best possible constant. This crate computes both gaps with exact,
//! certified or Monte Carlo integration, checks the inequalities, builds the
//! extremal functions, and does the same for weighted (Fejér) versions.
//!
//! ```
//! use hermite_simplex::{compute_lr, FunctionSpec, Pyramid, QuadratureConfig, Simplex};
//!
//! let t = Simplex::unit(2)?;
//! let f = FunctionSpec::Pyramid(Pyramid::unit());
//! let report = compute_lr(&t, &f, &QuadratureConfig::default())?;
//! assert!((report.l - 2.0 / 3.0).abs() < 1e-12);
//! assert!((report.r - 1.0 / 3.0).abs() < 1e-12);
//! assert!(report.verdict_hh.is_pass());
//! # Ok::<(), hermite_simplex::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`simplex`]: geometry, barycentric coordinates, cyclic shifts.
//! * [`polynomial`], [`expression`], [`function`]: what can be integrated.
//! * [`integration`]: the three backends.
//! * [`bounds`]: the gaps and verdicts.
//! * [`corpus`]: random instances and the batch verifier.
//! * [`report`]: JSON documents.

pub mod bounds;
pub mod corpus;
pub mod error;
pub mod expression;
pub mod function;
pub mod integration;
pub mod polynomial;
pub mod report;
pub mod sampling;
pub mod simplex;

pub use bounds::{
    compute_lr, demonstrate_no_uniform_fejer_constant, fejer_lr, make_sharpness_witness, verify_fejer_bounds,
    verify_one_dimensional, verify_refinement, BoundsReport, FejerReport, Verdict,
};
pub use error::{Error, Result};
pub use expression::Expression;
pub use function::{
    check_convexity_sampled, make_fejer_counterexample, make_pyramid, make_vertex_indicator, symmetrize,
    ClampedPyramid, EvalContext, FunctionSpec, Pyramid, VertexIndicator,
};
pub use integration::{
    integrate, integrate_bracketed, integrate_monte_carlo, integrate_product, Backend, BackendKind, IntegralKind,
    IntegralResult, QuadratureConfig, Refinement,
};
pub use polynomial::BaryPolynomial;
pub use simplex::{apply_permutation, BarycentricPoint, CyclicPermutation, Simplex, SimplexDoc};

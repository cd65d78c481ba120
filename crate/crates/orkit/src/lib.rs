//! orkit: building blocks for linear and nonlinear optimization tooling.
//!
//! The crate covers five areas:
//!
//! - [`model`] — linear models assembled as sparse rows and converted to a
//!   compressed column form.
//! - [`write`] — deterministic LP and MPS emission plus a replay LP reader
//!   for round-trip checks.
//! - [`generators`] — parameterized benchmark model families (p-median,
//!   cont5_2 control problem, clnlbeam and cont5_1 nonlinear instances).
//! - [`nlexpr`] — algebraic expression graphs, symbolic differentiation via
//!   the chain rule, equivalence-class deduplication, and sparse Jacobian
//!   evaluation plans.
//! - [`kernels`] — the dense/sparse revised-dual-simplex benchmark kernels
//!   (restricted transpose mat-vec, two-pass ratio test, checked axpy) over
//!   the [`sparse`] storage types.
//! - [`decomp`] — synchronous and asynchronous cutting-plane decomposition
//!   with a dynamic task pool (real threads or a deterministic simulated
//!   clock) and a bundled dense simplex for the master problem.
//!
//! With the `parallel` feature (on by default) batch Jacobian evaluation
//! runs on rayon; everything else is sequential by contract.

pub mod decomp;
pub mod generators;
pub mod kernels;
pub mod model;
pub mod nlexpr;
pub mod sparse;
pub mod write;

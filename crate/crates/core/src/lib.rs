//! Solvers for fractional programs `inf_{x in S} f(x)/g(x)` with a proper
//! convex nonsmooth numerator and a smooth concave or convex denominator.
//!
//! Three schemes share one trace format:
//!
//! * [`solver::run_concave`]: proximal-gradient iteration with the adaptive
//!   step `1/(2 L theta_k)`; the ratio sequence decreases monotonically to
//!   the optimal value at rate `O(1/k)`.
//! * [`solver::run_convex`]: proximal-gradient iteration with a configurable
//!   step policy and an optional first-step safeguard; limit points are
//!   critical for the ratio.
//! * [`solver::run_dinkelbach`]: the classical parametric baseline that
//!   fully solves `min f - theta g` each outer iteration; kept around to make
//!   its nested cost measurable.
//!
//! The [`oracle`] enumerates low-dimensional problems on a fine grid with a
//! certified discretization gap, and [`diagnostics`] replays every proven
//! inequality against a recorded trace. The `fracprox` binary wires these
//! into solve/verify/compare/oracle/sweep commands.

pub mod catalog;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod functions;
pub mod instance;
pub mod oracle;
pub mod solver;
pub mod trace;
pub mod vector;

pub use error::{Error, Result};
pub use functions::{Curvature, FeasibleSet, ProxFn, ProxKind, SmoothFn, SmoothKind};
pub use instance::{validate_instance, ProblemInstance, ValidationReport};
pub use oracle::{grid_minimize, grid_prox, OracleResult};
pub use solver::{
    concave_step, convex_step, run_concave, run_convex, run_dinkelbach, solve_parametric,
    InnerParams, SolverParams, StepPolicy, StepPolicyKind,
};
pub use trace::{IterationRecord, RunTrace, SolverKind, Termination};
pub use vector::{dot, Vector};

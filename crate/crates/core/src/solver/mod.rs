//! Iterative solvers: proximal-gradient schemes for concave and convex
//! denominators plus the classical parametric baseline.

pub mod concave;
pub mod convex;
pub mod dinkelbach;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, F_NONNEG_SLACK, G_BOUND_SLACK};
use crate::trace::{IterationRecord, RunTrace, SolverKind, Termination};
use crate::vector::Vector;

pub use concave::{concave_step, run_concave};
pub use convex::{convex_step, run_convex, StepPolicy, StepPolicyKind};
pub use dinkelbach::{run_dinkelbach, solve_parametric, solve_parametric_from, InnerParams};

/// A ratio increase beyond this is treated as divergence for the direct
/// solvers (their monotonicity is exact up to rounding).
pub const DIVERGENCE_TOL: f64 = 1e-9;

/// Stopping rules shared by all solvers. A tolerance of zero disables that
/// rule; `max_iter` is always active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub max_iter: u64,
    /// Stop once `theta_k - theta_{k+1} < tol_theta` (inactive at 0).
    pub tol_theta: f64,
    /// Stop once `||x^k - x^{k-1}|| < tol_step` (inactive at 0).
    pub tol_step: f64,
    /// Ratios at or below this are treated as zero; the concave step size
    /// `1/(2 L theta)` is undefined there.
    pub theta_floor: f64,
    /// Run the per-iteration inequality checks inline and fail fast.
    pub assert_mode: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol_theta: 0.0,
            tol_step: 0.0,
            theta_floor: 1e-12,
            assert_mode: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be >= 1".into()));
        }
        if self.tol_theta < 0.0 || self.tol_step < 0.0 {
            return Err(Error::InvalidParams("tolerances must be >= 0".into()));
        }
        if !(self.theta_floor > 0.0) {
            return Err(Error::InvalidParams("theta_floor must be > 0".into()));
        }
        Ok(())
    }
}

/// Checked in this order after every step.
pub(crate) fn stop_reason(
    params: &SolverParams,
    theta_k: f64,
    theta_next: f64,
    step_norm: f64,
    k: u64,
) -> Option<Termination> {
    if theta_next <= params.theta_floor {
        return Some(Termination::OptimalValueZero);
    }
    if params.tol_theta > 0.0 && theta_k - theta_next < params.tol_theta {
        return Some(Termination::ThetaTolReached);
    }
    if params.tol_step > 0.0 && step_norm < params.tol_step {
        return Some(Termination::StepTolReached);
    }
    if k == params.max_iter {
        return Some(Termination::MaxIter);
    }
    None
}

/// Standing-hypothesis guards on a freshly computed iterate.
pub(crate) fn guard_iterate(
    p: &ProblemInstance,
    k: u64,
    x: &Vector,
    f_val: f64,
    g_val: f64,
) -> Result<()> {
    if !x.is_finite() || !f_val.is_finite() || !g_val.is_finite() {
        return Err(Error::Hypothesis(format!(
            "non-finite iterate data at k = {k}"
        )));
    }
    if g_val <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "g(x^{k}) = {g_val} <= 0; the denominator must stay positive on S"
        )));
    }
    if g_val > p.bound_m() + G_BOUND_SLACK {
        return Err(Error::Hypothesis(format!(
            "g(x^{k}) = {g_val} exceeds the declared bound M = {}",
            p.bound_m()
        )));
    }
    if f_val < -F_NONNEG_SLACK {
        return Err(Error::Hypothesis(format!(
            "f(x^{k}) = {f_val} < 0; the numerator must stay nonnegative on S"
        )));
    }
    Ok(())
}

/// Degenerate run: the starting point already has ratio at the floor, so no
/// step is well-defined and the start itself is optimal. Emits a single
/// zero-step record with `eta = 0` as a sentinel.
pub(crate) fn zero_step_sentinel(
    p: &ProblemInstance,
    solver: SolverKind,
    started: Instant,
) -> Result<RunTrace> {
    let f0 = p.f().eval(p.x0())?;
    let g0 = p.g().eval(p.x0())?;
    let record = IterationRecord {
        k: 1,
        x: p.x0().clone(),
        theta: f0 / g0,
        eta: 0.0,
        f_val: f0,
        g_val: g0,
        step_norm: 0.0,
        residual_norm: 0.0,
    };
    RunTrace::new(
        vec![record],
        Termination::OptimalValueZero,
        started.elapsed().as_secs_f64(),
        solver,
        vec![],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_precedence() {
        let params = SolverParams {
            max_iter: 10,
            tol_theta: 0.5,
            tol_step: 0.5,
            theta_floor: 1e-12,
            assert_mode: false,
        };
        // Floor wins over everything.
        assert_eq!(
            stop_reason(&params, 1.0, 1e-13, 0.0, 10),
            Some(Termination::OptimalValueZero)
        );
        // Theta tolerance before step tolerance.
        assert_eq!(
            stop_reason(&params, 1.0, 0.9, 0.0, 1),
            Some(Termination::ThetaTolReached)
        );
        assert_eq!(
            stop_reason(&params, 1.0, 0.2, 0.1, 1),
            Some(Termination::StepTolReached)
        );
        assert_eq!(
            stop_reason(&params, 1.0, 0.2, 0.9, 10),
            Some(Termination::MaxIter)
        );
        assert_eq!(stop_reason(&params, 1.0, 0.2, 0.9, 3), None);
    }

    #[test]
    fn zero_tolerances_disable_rules() {
        let params = SolverParams::default();
        // Identical ratios and zero step, yet no tolerance fires.
        assert_eq!(stop_reason(&params, 0.5, 0.5, 0.0, 3), None);
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        assert!(SolverParams {
            max_iter: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverParams {
            theta_floor: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}

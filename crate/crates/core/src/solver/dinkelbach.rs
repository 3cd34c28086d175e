//! Classical parametric baseline: each outer iteration minimizes
//! `f - theta_k g` over `S` with an inner proximal-gradient loop, then
//! updates the ratio. The subproblem is convex for concave denominators;
//! for convex denominators the same loop runs and the outcome is a local
//! solve. Inner iteration counts are kept in the trace so the cost of the
//! nested solve stays visible.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::trace::{IterationRecord, RunTrace, SolverKind, Termination};
use crate::vector::Vector;

use super::{guard_iterate, stop_reason, zero_step_sentinel, SolverParams};

/// Keeps the inner step `1/(theta L + eps)` well-posed at `theta = 0`.
pub const INNER_STEP_EPS: f64 = 1e-12;

/// Ratio increases beyond the inner-solve tolerance indicate divergence.
const OUTER_MONOTONE_SLACK: f64 = 1e-8;

/// Inner proximal-gradient loop controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerParams {
    pub max_iter: u64,
    /// Stop once the inner step norm falls below this.
    pub tol: f64,
}

impl Default for InnerParams {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-10,
        }
    }
}

impl InnerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("inner max_iter must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams("inner tolerance must be > 0".into()));
        }
        Ok(())
    }
}

pub(crate) fn inner_step_size(p: &ProblemInstance, theta: f64) -> f64 {
    1.0 / (theta * p.lipschitz_l() + INNER_STEP_EPS)
}

/// Approximately minimizes `f + indicator(S) - theta * g` starting from `z0`
/// by iterating `z <- prox(f, z + theta * s * grad g(z), s)` with
/// `s = 1/(theta L + eps)`. Returns the final point and the number of inner
/// iterations (prox evaluations). Starting from a feasible point, the
/// subproblem objective never increases, so the outer ratio update stays
/// monotone up to rounding.
pub fn solve_parametric_from(
    p: &ProblemInstance,
    theta: f64,
    z0: &Vector,
    inner: &InnerParams,
) -> Result<(Vector, u64)> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "parametric ratio must be nonnegative, got {theta}"
        )));
    }
    inner.validate()?;
    let s = inner_step_size(p, theta);
    let mut z = z0.clone();
    let mut count = 0;
    for _ in 0..inner.max_iter {
        let grad = p.g().grad(&z)?;
        let y = z.add_scaled(theta * s, &grad);
        let z_next = p.f().prox(&y, s)?;
        count += 1;
        let step = z_next.dist(&z);
        z = z_next;
        if step < inner.tol {
            break;
        }
    }
    Ok((z, count))
}

/// [`solve_parametric_from`] started at the instance's `x0`.
pub fn solve_parametric(
    p: &ProblemInstance,
    theta: f64,
    inner: &InnerParams,
) -> Result<(Vector, u64)> {
    solve_parametric_from(p, theta, p.x0(), inner)
}

/// Outer loop: solve the parametric subproblem, update the ratio, repeat.
/// Each record's `eta` carries the inner step size used at that ratio.
pub fn run_dinkelbach(
    p: &ProblemInstance,
    params: &SolverParams,
    inner: &InnerParams,
) -> Result<RunTrace> {
    params.validate()?;
    inner.validate()?;
    let started = Instant::now();
    let g0 = p.g().eval(p.x0())?;
    if g0 <= 0.0 {
        return Err(Error::Hypothesis(format!("g(x0) = {g0} <= 0")));
    }
    let mut theta = p.f().eval(p.x0())? / g0;
    if theta <= params.theta_floor {
        return zero_step_sentinel(p, SolverKind::Dinkelbach, started);
    }

    let mut x = p.x0().clone();
    let mut records = Vec::new();
    let mut inner_iters = Vec::new();
    let mut termination = Termination::MaxIter;
    for k in 1..=params.max_iter {
        let s = inner_step_size(p, theta);
        let (x_k, count) = solve_parametric_from(p, theta, &x, inner)?;
        let f_k = p.f().eval(&x_k)?;
        let g_k = p.g().eval(&x_k)?;
        guard_iterate(p, k, &x_k, f_k, g_k)?;
        let theta_next = f_k / g_k;
        let step_norm = x_k.dist(&x);
        records.push(IterationRecord {
            k,
            x: x_k.clone(),
            theta,
            eta: s,
            f_val: f_k,
            g_val: g_k,
            step_norm,
            residual_norm: 0.0,
        });
        inner_iters.push(count);
        if theta_next > theta + OUTER_MONOTONE_SLACK {
            if params.assert_mode {
                return Err(Error::InlineDiagnostic(format!(
                    "outer ratio increased at k = {k}"
                )));
            }
            termination = Termination::Diverged;
            break;
        }
        if let Some(t) = stop_reason(params, theta, theta_next, step_norm, k) {
            termination = t;
            break;
        }
        x = x_k;
        theta = theta_next;
    }
    RunTrace::new(
        records,
        termination,
        started.elapsed().as_secs_f64(),
        SolverKind::Dinkelbach,
        inner_iters,
    )
}

/// Value of the parametric subproblem at the trace's final iterate with the
/// final ratio: `f(x) - theta g(x)`, which vanishes at a fixed point.
pub fn fixed_point_residual(p: &ProblemInstance, trace: &RunTrace) -> Result<f64> {
    let x = trace.x_final();
    let theta = trace.theta_final();
    Ok(p.f().eval(x)? - theta * p.g().eval(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::solver::run_concave;

    #[test]
    fn parametric_solve_p1_at_initial_ratio() {
        let p = catalog::p1();
        let (x, _) = solve_parametric(&p, 0.4, &InnerParams::default()).unwrap();
        assert!((x[0] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn parametric_value_vanishes_at_optimal_ratio() {
        let p = catalog::p1();
        let theta_bar = 0.1 / 1.51;
        let (x, _) = solve_parametric(&p, theta_bar, &InnerParams::default()).unwrap();
        let value = p.f().eval(&x).unwrap() - theta_bar * p.g().eval(&x).unwrap();
        assert!(value.abs() < 1e-8, "value = {value}");
    }

    #[test]
    fn parametric_theta_zero_minimizes_f() {
        let p = catalog::p4();
        let (x, _) = solve_parametric(&p, 0.0, &InnerParams::default()).unwrap();
        assert!(x[0].abs() < 1e-9);
    }

    #[test]
    fn p1_outer_loop_converges_fast() {
        let p = catalog::p1();
        let params = SolverParams {
            max_iter: 50,
            tol_theta: 1e-12,
            ..Default::default()
        };
        let t = run_dinkelbach(&p, &params, &InnerParams::default()).unwrap();
        assert!(t.len() <= 3, "took {} outer iterations", t.len());
        assert!((t.theta_final() - 0.1 / 1.51).abs() < 1e-9);
        let r = fixed_point_residual(&p, &t).unwrap();
        assert!(r.abs() < 1e-6);
    }

    #[test]
    fn p4_terminates_at_zero_ratio() {
        let p = catalog::p4();
        let params = SolverParams {
            max_iter: 50,
            tol_theta: 1e-12,
            ..Default::default()
        };
        let t = run_dinkelbach(&p, &params, &InnerParams::default()).unwrap();
        assert_eq!(t.termination, Termination::OptimalValueZero);
        assert!(t.theta_final() < 1e-12);
        assert!(t.inner_iters.iter().sum::<u64>() > 1);
    }

    #[test]
    fn p3_nonconvex_subproblem_still_reaches_critical_ratio() {
        let p = catalog::p3();
        let params = SolverParams {
            max_iter: 100,
            tol_theta: 1e-12,
            ..Default::default()
        };
        let t = run_dinkelbach(&p, &params, &InnerParams::default()).unwrap();
        assert!((t.theta_final() - 0.19003).abs() < 1e-4);
    }

    #[test]
    fn agreement_with_direct_solver() {
        for id in ["P1", "P2", "P4"] {
            let p = catalog::by_id(id).unwrap();
            let params = SolverParams {
                max_iter: 500,
                tol_theta: 1e-13,
                ..Default::default()
            };
            let direct = run_concave(&p, &params).unwrap();
            let baseline = run_dinkelbach(&p, &params, &InnerParams::default()).unwrap();
            assert!(
                (direct.theta_final() - baseline.theta_final()).abs() < 1e-5,
                "{id}: {} vs {}",
                direct.theta_final(),
                baseline.theta_final()
            );
        }
    }

    #[test]
    fn negative_ratio_rejected() {
        let p = catalog::p1();
        assert!(solve_parametric(&p, -0.1, &InnerParams::default()).is_err());
    }
}

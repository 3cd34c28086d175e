//! Proximal-gradient iteration for concave denominators with the adaptive
//! step `eta_k = 1 / (2 L theta_k)`: a gradient step on `g` scaled by the
//! current ratio, then the joint prox of `(f, S)`. The ratio sequence is
//! nonincreasing and converges to the optimal value at rate `O(1/k)`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::trace::{IterationRecord, RunTrace, SolverKind, Termination};
use crate::vector::Vector;

use super::{guard_iterate, stop_reason, zero_step_sentinel, SolverParams, DIVERGENCE_TOL};

/// Slack for the inline per-iteration inequality in assert mode.
const INLINE_SLACK: f64 = 1e-10;

/// One iteration: returns `(x_k, theta_next, eta_k)`.
///
/// Requires a concave-tagged instance and `theta_k > 0`; callers handle the
/// ratio floor before stepping.
pub fn concave_step(
    p: &ProblemInstance,
    x_prev: &Vector,
    theta_k: f64,
) -> Result<(Vector, f64, f64)> {
    if p.curvature() != crate::functions::Curvature::Concave {
        return Err(Error::InvalidParams(
            "concave step requires a concave-tagged instance".into(),
        ));
    }
    if !(theta_k > 0.0 && theta_k.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "ratio must be positive and finite, got {theta_k}"
        )));
    }
    let l = p.lipschitz_l();
    // Expression shape must match the recomputation in
    // diagnostics::check_concave_inequalities (bit-level consistency check).
    let eta = 1.0 / (2.0 * l * theta_k);
    let grad = p.g().grad(x_prev)?;
    let y = x_prev.add_scaled(theta_k * eta, &grad);
    let x_k = p.f().prox(&y, eta)?;
    let g_k = p.g().eval(&x_k)?;
    if g_k <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "g = {g_k} <= 0 at the new iterate"
        )));
    }
    let theta_next = p.f().eval(&x_k)? / g_k;
    Ok((x_k, theta_next, eta))
}

/// Runs the concave-denominator iteration from `x0` until a stopping rule
/// fires. A start whose ratio is already at the floor yields a single
/// zero-step record terminated `OptimalValueZero`.
pub fn run_concave(p: &ProblemInstance, params: &SolverParams) -> Result<RunTrace> {
    params.validate()?;
    let started = Instant::now();
    let g0 = p.g().eval(p.x0())?;
    if g0 <= 0.0 {
        return Err(Error::Hypothesis(format!("g(x0) = {g0} <= 0")));
    }
    let mut theta = p.f().eval(p.x0())? / g0;
    if theta <= params.theta_floor {
        return zero_step_sentinel(p, SolverKind::Concave, started);
    }

    let mut x = p.x0().clone();
    let mut records = Vec::new();
    let mut termination = Termination::MaxIter;
    for k in 1..=params.max_iter {
        let (x_k, theta_next, eta) = concave_step(p, &x, theta)?;
        let f_k = p.f().eval(&x_k)?;
        let g_k = p.g().eval(&x_k)?;
        guard_iterate(p, k, &x_k, f_k, g_k)?;
        let step_norm = x_k.dist(&x);
        records.push(IterationRecord {
            k,
            x: x_k.clone(),
            theta,
            eta,
            f_val: f_k,
            g_val: g_k,
            step_norm,
            residual_norm: 0.0,
        });
        if params.assert_mode {
            let lhs = (theta_next - theta) * g_k
                + 1.5 * p.lipschitz_l() * theta * step_norm * step_norm;
            if lhs > INLINE_SLACK {
                return Err(Error::InlineDiagnostic(format!(
                    "per-iteration decrease inequality failed at k = {k}: lhs = {lhs:e}"
                )));
            }
        }
        if theta_next > theta + DIVERGENCE_TOL {
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
        SolverKind::Concave,
        vec![],
    )
}

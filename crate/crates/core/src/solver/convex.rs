//! Proximal-gradient iteration for convex denominators with a configurable
//! step policy. The ratio sequence is nonincreasing for any positive steps;
//! under the safeguard (`eta_1 theta_1 < 1/L`, nonincreasing steps) the
//! iterates settle and the criticality residual vanishes along the tail.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::trace::{IterationRecord, RunTrace, SolverKind, Termination};
use crate::vector::Vector;

use super::{guard_iterate, stop_reason, zero_step_sentinel, SolverParams, DIVERGENCE_TOL};

const INLINE_SLACK: f64 = 1e-10;

/// Step-size schedule for the convex-denominator solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepPolicyKind {
    Constant { eta: f64 },
    /// `eta_k = eta1 * ratio^(k-1)` with `ratio` in `(0, 1]`.
    Geometric { eta1: f64, ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub kind: StepPolicyKind,
    /// Enforce `eta_1 theta_1 < 1/L` at run start (the schedule kinds are
    /// nonincreasing by construction).
    pub safeguard: bool,
}

impl StepPolicy {
    pub fn constant(eta: f64, safeguard: bool) -> Self {
        Self {
            kind: StepPolicyKind::Constant { eta },
            safeguard,
        }
    }

    pub fn geometric(eta1: f64, ratio: f64, safeguard: bool) -> Self {
        Self {
            kind: StepPolicyKind::Geometric { eta1, ratio },
            safeguard,
        }
    }

    pub fn eta(&self, k: u64) -> f64 {
        match self.kind {
            StepPolicyKind::Constant { eta } => eta,
            StepPolicyKind::Geometric { eta1, ratio } => ratio.powi((k - 1) as i32) * eta1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eta1 = self.eta(1);
        if !(eta1 > 0.0 && eta1.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "step size must be positive and finite, got {eta1}"
            )));
        }
        if let StepPolicyKind::Geometric { ratio, .. } = self.kind {
            if !(ratio > 0.0 && ratio <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "geometric ratio must lie in (0, 1], got {ratio}"
                )));
            }
        }
        Ok(())
    }

    fn check_safeguard(&self, theta1: f64, l: f64) -> Result<()> {
        if !self.safeguard {
            return Ok(());
        }
        let eta1 = self.eta(1);
        if eta1 * theta1 >= 1.0 / l {
            return Err(Error::Safeguard(format!(
                "η₁θ₁ < 1/L required: {eta1} · {theta1} = {} >= {}",
                eta1 * theta1,
                1.0 / l
            )));
        }
        Ok(())
    }
}

/// One iteration: returns `(x_k, theta_next, residual)` where the residual is
/// the criticality element
/// `(1/g(x^k)) [ -theta_{k+1} grad g(x^k) + theta_k grad g(x^{k-1}) + (x^{k-1} - x^k)/eta_k ]`.
pub fn convex_step(
    p: &ProblemInstance,
    x_prev: &Vector,
    theta_k: f64,
    eta_k: f64,
) -> Result<(Vector, f64, Vector)> {
    if p.curvature() != crate::functions::Curvature::Convex {
        return Err(Error::InvalidParams(
            "convex step requires a convex-tagged instance".into(),
        ));
    }
    if !(eta_k > 0.0 && eta_k.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "step size must be positive and finite, got {eta_k}"
        )));
    }
    let grad_prev = p.g().grad(x_prev)?;
    let y = x_prev.add_scaled(theta_k * eta_k, &grad_prev);
    let x_k = p.f().prox(&y, eta_k)?;
    let g_k = p.g().eval(&x_k)?;
    if g_k <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "g = {g_k} <= 0 at the new iterate"
        )));
    }
    let theta_next = p.f().eval(&x_k)? / g_k;
    let grad_k = p.g().grad(&x_k)?;
    let residual = grad_k
        .scale(-theta_next)
        .add_scaled(theta_k, &grad_prev)
        .add_scaled(1.0 / eta_k, &x_prev.sub(&x_k))
        .scale(1.0 / g_k);
    Ok((x_k, theta_next, residual))
}

/// Runs the convex-denominator iteration under the given step policy.
pub fn run_convex(
    p: &ProblemInstance,
    policy: &StepPolicy,
    params: &SolverParams,
) -> Result<RunTrace> {
    params.validate()?;
    policy.validate()?;
    let started = Instant::now();
    let g0 = p.g().eval(p.x0())?;
    if g0 <= 0.0 {
        return Err(Error::Hypothesis(format!("g(x0) = {g0} <= 0")));
    }
    let mut theta = p.f().eval(p.x0())? / g0;
    policy.check_safeguard(theta, p.lipschitz_l())?;
    if theta <= params.theta_floor {
        return zero_step_sentinel(p, SolverKind::Convex, started);
    }

    let mut x = p.x0().clone();
    let mut records = Vec::new();
    let mut termination = Termination::MaxIter;
    for k in 1..=params.max_iter {
        let eta = policy.eta(k);
        let (x_k, theta_next, residual) = convex_step(p, &x, theta, eta)?;
        let f_k = p.f().eval(&x_k)?;
        let g_k = p.g().eval(&x_k)?;
        guard_iterate(p, k, &x_k, f_k, g_k)?;
        let step_norm = x_k.dist(&x);
        let residual_norm = residual.norm();
        records.push(IterationRecord {
            k,
            x: x_k.clone(),
            theta,
            eta,
            f_val: f_k,
            g_val: g_k,
            step_norm,
            residual_norm,
        });
        if params.assert_mode {
            let lhs = (theta_next - theta) * g_k + step_norm * step_norm / eta;
            if lhs > INLINE_SLACK {
                return Err(Error::InlineDiagnostic(format!(
                    "per-iteration decrease inequality failed at k = {k}: lhs = {lhs:e}"
                )));
            }
            let grad_norm = p.g().grad(&x_k)?.norm();
            let bound = (1.0 / eta + theta * p.lipschitz_l()) * step_norm
                + (theta - theta_next) * grad_norm;
            if residual_norm > bound / g_k + INLINE_SLACK {
                return Err(Error::InlineDiagnostic(format!(
                    "residual bound failed at k = {k}: {residual_norm:e} > {:e}",
                    bound / g_k
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
        SolverKind::Convex,
        vec![],
    )
}

/// Distance from the final iterate to the boundary of `S`; a converged point
/// closer than the step tolerance leaves the criticality claim unverified.
pub fn final_boundary_distance(p: &ProblemInstance, trace: &RunTrace) -> f64 {
    p.f().set().boundary_distance(trace.x_final())
}

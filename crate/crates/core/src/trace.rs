//! Iteration-trace data model shared by all solvers. A trace is the sole
//! input to the diagnostics layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Why a run stopped. `MaxIter` is a normal termination, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ThetaTolReached,
    StepTolReached,
    MaxIter,
    /// The ratio fell to (numerical) zero; the step size of the concave
    /// solver is undefined there and any zero of `f` is optimal.
    OptimalValueZero,
    /// Reserved for runs whose iterates stop behaving (ratio increased
    /// beyond noise); unreachable for well-formed instances.
    Diverged,
}

/// Which solver produced a trace; checkers reject the wrong family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Concave,
    Convex,
    Dinkelbach,
}

/// One iteration: `theta` is the ratio *used* by step `k`, while `f_val` and
/// `g_val` are evaluated at the new iterate `x`, so the next ratio is always
/// `f_val / g_val` exactly as computed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u64,
    pub x: Vector,
    pub theta: f64,
    pub eta: f64,
    pub f_val: f64,
    pub g_val: f64,
    /// `||x^k - x^{k-1}||`.
    pub step_norm: f64,
    /// Criticality residual norm; zero sentinel outside the convex solver.
    pub residual_norm: f64,
}

impl IterationRecord {
    /// The ratio after this iteration, `f(x^k) / g(x^k)`.
    pub fn theta_next(&self) -> f64 {
        self.f_val / self.g_val
    }
}

/// Ordered records plus a termination summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    /// Seconds spent inside the solve loop.
    pub wall_time: f64,
    pub solver: SolverKind,
    /// Inner iteration counts per outer record; empty for the direct solvers.
    pub inner_iters: Vec<u64>,
}

impl RunTrace {
    pub fn new(
        records: Vec<IterationRecord>,
        termination: Termination,
        wall_time: f64,
        solver: SolverKind,
        inner_iters: Vec<u64>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidTrace("trace must contain records".into()));
        }
        for (i, r) in records.iter().enumerate() {
            if r.k != i as u64 + 1 {
                return Err(Error::InvalidTrace(format!(
                    "record {} has k = {}, expected {}",
                    i,
                    r.k,
                    i + 1
                )));
            }
        }
        if !inner_iters.is_empty() && inner_iters.len() != records.len() {
            return Err(Error::InvalidTrace(
                "inner iteration counts must match record count".into(),
            ));
        }
        Ok(Self {
            records,
            termination,
            wall_time,
            solver,
            inner_iters,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("trace is nonempty")
    }

    /// Ratio at the final iterate.
    pub fn theta_final(&self) -> f64 {
        self.final_record().theta_next()
    }

    pub fn x_final(&self) -> &Vector {
        &self.final_record().x
    }

    /// Proximal-map evaluations consumed by the run. Direct solvers use one
    /// per iteration; the parametric baseline sums its inner loops.
    pub fn total_prox_evals(&self) -> u64 {
        if self.inner_iters.is_empty() {
            self.records.len() as u64
        } else {
            self.inner_iters.iter().sum()
        }
    }

    /// True for the degenerate one-record trace emitted when the starting
    /// point already has ratio zero (no step was taken, `eta` is a zero
    /// sentinel).
    pub fn is_zero_step_sentinel(&self) -> bool {
        self.termination == Termination::OptimalValueZero
            && self.records.len() == 1
            && self.records[0].eta == 0.0
            && self.records[0].step_norm == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: u64, theta: f64) -> IterationRecord {
        IterationRecord {
            k,
            x: Vector::scalar(0.0).unwrap(),
            theta,
            eta: 1.0,
            f_val: theta,
            g_val: 1.0,
            step_norm: 0.0,
            residual_norm: 0.0,
        }
    }

    #[test]
    fn rejects_empty_and_bad_indices() {
        assert!(RunTrace::new(vec![], Termination::MaxIter, 0.0, SolverKind::Concave, vec![]).is_err());
        let bad = vec![rec(1, 1.0), rec(3, 0.5)];
        assert!(RunTrace::new(bad, Termination::MaxIter, 0.0, SolverKind::Concave, vec![]).is_err());
    }

    #[test]
    fn theta_final_is_ratio_at_last_iterate() {
        let t = RunTrace::new(
            vec![rec(1, 1.0), rec(2, 0.5)],
            Termination::MaxIter,
            0.0,
            SolverKind::Concave,
            vec![],
        )
        .unwrap();
        assert_eq!(t.theta_final(), 0.5);
        assert_eq!(t.total_prox_evals(), 2);
    }

    #[test]
    fn prox_evals_sum_inner_iterations() {
        let t = RunTrace::new(
            vec![rec(1, 1.0), rec(2, 0.5)],
            Termination::MaxIter,
            0.0,
            SolverKind::Dinkelbach,
            vec![10, 4],
        )
        .unwrap();
        assert_eq!(t.total_prox_evals(), 14);
    }
}

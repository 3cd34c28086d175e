//! Post-hoc verification of a run trace: monotonicity, the per-iteration
//! decrease and distance inequalities, the `O(1/k)` rate bound against the
//! grid oracle, energy summability, residual bounds and tail behavior.
//!
//! Every check is a pure function of (trace, instance, oracle). On an
//! untampered trace from the matching solver each proven inequality must
//! hold; the slacks only absorb floating-point noise, scaled per check, plus
//! the oracle's certified gap wherever oracle values enter.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, F_NONNEG_SLACK, G_BOUND_SLACK};
use crate::oracle::OracleResult;
use crate::trace::{RunTrace, SolverKind};
use crate::vector::Vector;

/// Slack for per-iteration algebraic identities.
pub const SLACK_ALGEBRAIC: f64 = 1e-10;
/// Slack for accumulated sums.
pub const SLACK_SUM: f64 = 1e-8;
/// Slack for ratio monotonicity.
pub const SLACK_THETA: f64 = 1e-12;
/// Oracle quality required by the distance-based checks.
pub const ORACLE_GAP_LIMIT: f64 = 1e-5;
/// Tail sums of step norms below this count as empirically summable.
pub const CAUCHY_TAIL_LIMIT: f64 = 1e-6;

/// One violated inequality, keyed by the iteration it occurred at.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub k: u64,
    pub message: String,
}

/// Outcome of a single check over a whole trace.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    fn new(check: &str) -> Self {
        Self {
            check: check.into(),
            passed: true,
            violations: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn violate(&mut self, k: u64, message: String) {
        self.passed = false;
        self.violations.push(Violation { k, message });
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

fn require_solver(t: &RunTrace, expected: SolverKind, check: &str) -> Result<()> {
    if t.solver != expected {
        return Err(Error::TraceMismatch(format!(
            "{check} expects a {expected:?} trace, got {:?}",
            t.solver
        )));
    }
    Ok(())
}

/// The stored ratio sequence never increases beyond [`SLACK_THETA`].
pub fn check_theta_monotone(t: &RunTrace) -> Report {
    let mut report = Report::new("theta_monotone");
    for w in t.records.windows(2) {
        if w[1].theta > w[0].theta + SLACK_THETA {
            report.violate(
                w[0].k,
                format!("theta rose from {} to {}", w[0].theta, w[1].theta),
            );
        }
    }
    report
}

/// Stored numerator/denominator values satisfy the standing hypotheses.
pub fn check_value_bounds(t: &RunTrace, p: &ProblemInstance) -> Report {
    let mut report = Report::new("value_bounds");
    for r in &t.records {
        if !(r.g_val > 0.0 && r.g_val <= p.bound_m() + G_BOUND_SLACK) {
            report.violate(r.k, format!("g = {} outside (0, M]", r.g_val));
        }
        if r.f_val < -F_NONNEG_SLACK {
            report.violate(r.k, format!("f = {} < 0", r.f_val));
        }
    }
    report
}

/// Concave-solver inequalities: the per-iteration decrease bound
/// `(theta_{k+1} - theta_k) g(x^k) + (3 L theta_k / 2) ||x^k - x^{k-1}||^2 <= 0`
/// and bit-level consistency of the adaptive step `eta_k = 1/(2 L theta_k)`.
pub fn check_concave_inequalities(t: &RunTrace, p: &ProblemInstance) -> Result<Report> {
    require_solver(t, SolverKind::Concave, "check_concave_inequalities")?;
    let mut report = Report::new("concave_inequalities");
    let l = p.lipschitz_l();
    let sentinel = t.is_zero_step_sentinel();
    for r in &t.records {
        if !sentinel {
            // Identical expression to the solver's; any drift means the
            // trace does not come from this step rule.
            let eta_expected = 1.0 / (2.0 * l * r.theta);
            if r.eta.to_bits() != eta_expected.to_bits() {
                report.violate(
                    r.k,
                    format!("eta = {:e} differs from 1/(2 L theta) = {:e}", r.eta, eta_expected),
                );
            }
        }
        let lhs = (r.theta_next() - r.theta) * r.g_val + 1.5 * l * r.theta * r.step_norm * r.step_norm;
        if lhs > SLACK_ALGEBRAIC {
            report.violate(r.k, format!("decrease inequality lhs = {lhs:e}"));
        }
    }
    // Telescoping the decrease inequality bounds the ratio-weighted energy:
    // (3L/2) sum theta_k s_k^2 <= (theta_1 - theta_last) M.
    let energy: f64 = t
        .records
        .iter()
        .map(|r| r.theta * r.step_norm * r.step_norm)
        .sum();
    let budget = (t.records[0].theta - t.theta_final()) * p.bound_m() + SLACK_SUM;
    if 1.5 * l * energy > budget {
        report.violate(
            t.final_record().k,
            format!("energy {:e} exceeds telescoped budget {budget:e}", 1.5 * l * energy),
        );
    }
    report.metric("theta_weighted_energy", energy);
    report.metric("energy_budget", budget);
    Ok(report)
}

fn require_certified(o: &OracleResult) -> Result<()> {
    if !(o.certified_gap < ORACLE_GAP_LIMIT) {
        return Err(Error::InvalidParams(format!(
            "oracle certified gap {} is not below {ORACLE_GAP_LIMIT}",
            o.certified_gap
        )));
    }
    Ok(())
}

/// Distance inequality toward the oracle's minimizer:
/// `(L theta_k / 2) s_k^2 + L theta_{k+1} d_k^2 - L theta_k d_{k-1}^2 <= (theta_k - theta_{k+1}) M`
/// with `s_k` the step norm and `d_k = ||x_bar - x^k||`, slack
/// `1e-8 + L * certified_gap`.
pub fn check_fejer(t: &RunTrace, p: &ProblemInstance, o: &OracleResult) -> Result<Report> {
    require_solver(t, SolverKind::Concave, "check_fejer")?;
    require_certified(o)?;
    let mut report = Report::new("fejer");
    let l = p.lipschitz_l();
    let m = p.bound_m();
    let slack = SLACK_SUM + l * o.certified_gap;
    let mut prev_x = p.x0();
    for r in &t.records {
        let theta_next = r.theta_next();
        let d_prev = o.x_bar.dist(prev_x);
        let d_cur = o.x_bar.dist(&r.x);
        let lhs = 0.5 * l * r.theta * r.step_norm * r.step_norm + l * theta_next * d_cur * d_cur
            - l * r.theta * d_prev * d_prev;
        let rhs = (r.theta - theta_next) * m;
        if lhs > rhs + slack {
            report.violate(r.k, format!("lhs = {lhs:e} > rhs = {rhs:e}"));
        }
        prev_x = &r.x;
    }
    Ok(report)
}

/// Rate bound toward the oracle value: for every `k`,
/// `-gap <= theta_{k+1} - theta_bar <= theta_1 (M + L ||x_bar - x0||^2) / (k g(x_bar)) + gap`.
/// The metrics carry the worst observed tightness ratio.
pub fn check_rate_bound(t: &RunTrace, p: &ProblemInstance, o: &OracleResult) -> Result<Report> {
    require_solver(t, SolverKind::Concave, "check_rate_bound")?;
    let mut report = Report::new("rate_bound");
    let l = p.lipschitz_l();
    let m = p.bound_m();
    let gap = o.certified_gap;
    let theta1 = t.records[0].theta;
    let g_bar = p.g().eval(&o.x_bar)?;
    if g_bar <= 0.0 {
        return Err(Error::Hypothesis(format!("g(x_bar) = {g_bar} <= 0")));
    }
    let d0 = o.x_bar.dist(p.x0());
    let numerator = theta1 * (m + l * d0 * d0);
    let mut tightness = 0.0_f64;
    for r in &t.records {
        let excess = r.theta_next() - o.theta_bar;
        let bound = numerator / (r.k as f64 * g_bar);
        if excess < -gap {
            report.violate(r.k, format!("ratio fell below oracle value by {excess:e}"));
        }
        if excess > bound + gap {
            report.violate(r.k, format!("excess = {excess:e} > bound = {bound:e}"));
        }
        if bound > 0.0 {
            tightness = tightness.max(excess / bound);
        }
    }
    report.metric("tightness_ratio", tightness);
    report.metric("bound_at_k1", numerator / g_bar);
    Ok(report)
}

/// Convex-solver inequalities: the per-iteration decrease bound
/// `(theta_{k+1} - theta_k) g(x^k) + (1/eta_k) ||x^k - x^{k-1}||^2 <= 0`,
/// the telescoped energy bound
/// `sum_k (1/eta_k) ||x^k - x^{k-1}||^2 <= (theta_1 - theta_last) M`,
/// and the residual-norm bound
/// `||r_k|| <= (1/g(x^k)) [ (1/eta_k + theta_k L) s_k + (theta_k - theta_{k+1}) ||grad g(x^k)|| ]`.
pub fn check_convex_inequalities(t: &RunTrace, p: &ProblemInstance) -> Result<Report> {
    require_solver(t, SolverKind::Convex, "check_convex_inequalities")?;
    let mut report = Report::new("convex_inequalities");
    let l = p.lipschitz_l();
    let m = p.bound_m();
    let sentinel = t.is_zero_step_sentinel();
    let mut energy = 0.0;
    for r in &t.records {
        if sentinel {
            continue;
        }
        let theta_next = r.theta_next();
        let lhs = (theta_next - r.theta) * r.g_val + r.step_norm * r.step_norm / r.eta;
        if lhs > SLACK_ALGEBRAIC {
            report.violate(r.k, format!("decrease inequality lhs = {lhs:e}"));
        }
        energy += r.step_norm * r.step_norm / r.eta;

        let grad_norm = p.g().grad(&r.x)?.norm();
        let bound =
            ((1.0 / r.eta + r.theta * l) * r.step_norm + (r.theta - theta_next) * grad_norm)
                / r.g_val;
        if r.residual_norm > bound + SLACK_ALGEBRAIC {
            report.violate(
                r.k,
                format!("residual {0:e} > bound {bound:e}", r.residual_norm),
            );
        }
    }
    let theta1 = t.records[0].theta;
    let theta_last = t.theta_final();
    let energy_budget = (theta1 - theta_last) * m + SLACK_SUM;
    if energy > energy_budget {
        report.violate(
            t.final_record().k,
            format!("energy {energy:e} exceeds telescoped budget {energy_budget:e}"),
        );
    }
    report.metric("energy", energy);
    report.metric("energy_budget", energy_budget);
    report.metric("final_residual_norm", t.final_record().residual_norm);
    Ok(report)
}

/// Extracts the summability triple from a concave trace and oracle point:
/// `a_k = L theta_k ||x_bar - x^{k-1}||^2`, `b_k = (L theta_k / 2) s_k^2`,
/// `eps_k = (theta_k - theta_{k+1}) M`.
pub fn sequence_triple_from_trace(
    t: &RunTrace,
    p: &ProblemInstance,
    o: &OracleResult,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    require_solver(t, SolverKind::Concave, "sequence_triple_from_trace")?;
    let l = p.lipschitz_l();
    let m = p.bound_m();
    let mut a = Vec::with_capacity(t.len());
    let mut b = Vec::with_capacity(t.len());
    let mut eps = Vec::with_capacity(t.len());
    let mut prev_x = p.x0();
    for r in &t.records {
        let d_prev = o.x_bar.dist(prev_x);
        a.push(l * r.theta * d_prev * d_prev);
        b.push(0.5 * l * r.theta * r.step_norm * r.step_norm);
        eps.push((r.theta - r.theta_next()) * m);
        prev_x = &r.x;
    }
    Ok((a, b, eps))
}

/// Self-test of the two summability lemmas on explicit sequences.
///
/// Hypotheses checked: `b, eps >= 0`, the recurrence
/// `a_{k+1} - a_k + b_k <= eps_k`, an empirical summability flag for `eps`
/// (tail of `k * eps_k` must decay), and a contraction estimate
/// `a_hat = max (a_{k+1} - eps_k)/a_k < 1` for the geometric form. When the
/// hypotheses hold, the conclusions are asserted: `a` settles within
/// [`SLACK_SUM`] tail oscillation, partial sums of `b` stay within the
/// telescoped budget, and under contraction the partial sums of `a` stay
/// within `(a_0 + sum eps)/(1 - a_hat)`.
pub fn check_sequence_lemmas(a: &[f64], b: &[f64], eps: &[f64]) -> Result<Report> {
    if a.len() != b.len() || a.len() != eps.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len().max(eps.len())));
    }
    if a.is_empty() {
        return Err(Error::InvalidParams("sequences must be nonempty".into()));
    }
    let mut report = Report::new("sequence_lemmas");
    let n = a.len();

    let mut hypotheses_ok = true;
    if b.iter().any(|&v| v < -SLACK_ALGEBRAIC) || eps.iter().any(|&v| v < -SLACK_ALGEBRAIC) {
        hypotheses_ok = false;
    }
    for k in 0..n - 1 {
        if a[k + 1] - a[k] + b[k] > eps[k] + SLACK_ALGEBRAIC {
            hypotheses_ok = false;
            report.violate(
                k as u64 + 1,
                format!(
                    "recurrence broken: {} - {} + {} > {}",
                    a[k + 1],
                    a[k],
                    b[k],
                    eps[k]
                ),
            );
            break;
        }
    }

    // Empirical summability: the tail of k*eps_k must decay relative to its
    // head (a harmonic tail stays flat and is flagged).
    let weighted: Vec<f64> = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| (k + 1) as f64 * e)
        .collect();
    let quarter = (n / 4).max(1);
    let head: f64 = weighted[..quarter].iter().sum::<f64>() / quarter as f64;
    let tail: f64 = weighted[n - quarter..].iter().sum::<f64>() / quarter as f64;
    let eps_summable = tail <= 0.5 * head + SLACK_ALGEBRAIC;
    report.metric("eps_tail_mean", tail);
    report.metric("eps_head_mean", head);
    if !eps_summable {
        hypotheses_ok = false;
    }
    report.metric("hypotheses_met", if hypotheses_ok { 1.0 } else { 0.0 });

    if hypotheses_ok {
        // Conclusion: a converges (tail oscillation small).
        let tail_start = n.saturating_sub(quarter.max(2));
        let tail_slice = &a[tail_start..];
        let osc = tail_slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - tail_slice.iter().cloned().fold(f64::INFINITY, f64::min);
        report.metric("a_tail_oscillation", osc);
        if osc > SLACK_SUM {
            report.violate(n as u64, format!("tail oscillation {osc:e}"));
        }

        // Conclusion: partial sums of b bounded by the telescoped budget.
        let sum_b: f64 = b.iter().sum();
        let min_a = a.iter().cloned().fold(f64::INFINITY, f64::min);
        let sum_eps: f64 = eps.iter().sum();
        let budget = a[0] - min_a + sum_eps + SLACK_SUM;
        report.metric("b_partial_sum", sum_b);
        if sum_b > budget {
            report.violate(n as u64, format!("sum b = {sum_b:e} > budget {budget:e}"));
        }

        // Geometric form: estimate the contraction factor and bound sum a.
        let mut contraction = 0.0_f64;
        let mut estimable = true;
        for k in 0..n - 1 {
            if a[k] > 1e-300 {
                contraction = contraction.max((a[k + 1] - eps[k]) / a[k]);
            } else if a[k + 1] - eps[k] > SLACK_ALGEBRAIC {
                estimable = false;
            }
        }
        if estimable && contraction < 1.0 {
            report.metric("contraction", contraction);
            let sum_a: f64 = a.iter().sum();
            let budget_a = (a[0] + sum_eps) / (1.0 - contraction) + SLACK_SUM;
            if sum_a > budget_a {
                report.violate(n as u64, format!("sum a = {sum_a:e} > {budget_a:e}"));
            }
        }
    }
    Ok(report)
}

/// Sum of step norms over the last `window` records; passes below
/// [`CAUCHY_TAIL_LIMIT`]. The trace must be longer than `2 * window`.
pub fn check_cauchy_tail(t: &RunTrace, window: usize) -> Result<Report> {
    if window == 0 {
        return Err(Error::InvalidParams("window must be >= 1".into()));
    }
    if t.len() < 2 * window {
        return Err(Error::InvalidParams(format!(
            "trace of length {} is too short for window {window}",
            t.len()
        )));
    }
    let mut report = Report::new("cauchy_tail");
    let tail: f64 = t.records[t.len() - window..]
        .iter()
        .map(|r| r.step_norm)
        .sum();
    report.metric("tail_step_sum", tail);
    report.metric("window", window as f64);
    if !(tail < CAUCHY_TAIL_LIMIT) {
        report.violate(
            t.final_record().k,
            format!("tail step sum {tail:e} >= {CAUCHY_TAIL_LIMIT:e}"),
        );
    }
    Ok(report)
}

/// Builds an oracle result by hand; used to probe the distance checks with
/// non-optimal reference points.
pub fn synthetic_oracle(theta_bar: f64, x_bar: Vector, certified_gap: f64) -> OracleResult {
    OracleResult {
        theta_bar,
        x_bar,
        resolution: 0.0,
        certified_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::oracle::grid_minimize;
    use crate::solver::{run_concave, run_convex, run_dinkelbach, InnerParams, SolverParams, StepPolicy};
    use crate::trace::{IterationRecord, Termination};

    fn p1_trace() -> (ProblemInstance, RunTrace) {
        let p = catalog::p1();
        let t = run_concave(
            &p,
            &SolverParams {
                max_iter: 500,
                tol_theta: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        (p, t)
    }

    fn synthetic_trace(thetas: &[f64]) -> RunTrace {
        let records: Vec<IterationRecord> = thetas
            .iter()
            .enumerate()
            .map(|(i, &theta)| IterationRecord {
                k: i as u64 + 1,
                x: Vector::scalar(0.0).unwrap(),
                theta,
                eta: 1.0,
                f_val: theta,
                g_val: 1.0,
                step_norm: 0.0,
                residual_norm: 0.0,
            })
            .collect();
        RunTrace::new(records, Termination::MaxIter, 0.0, SolverKind::Concave, vec![]).unwrap()
    }

    #[test]
    fn monotone_pass_fail_vacuous() {
        let p = catalog::p4();
        let t = run_concave(
            &p,
            &SolverParams {
                max_iter: 50,
                tol_theta: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(check_theta_monotone(&t).passed);

        let bad = synthetic_trace(&[1.0, 1.1]);
        let r = check_theta_monotone(&bad);
        assert!(!r.passed);
        assert_eq!(r.violations[0].k, 1);

        let single = synthetic_trace(&[0.3]);
        assert!(check_theta_monotone(&single).passed);
    }

    #[test]
    fn concave_inequalities_pass_on_catalog_runs() {
        let (p, t) = p1_trace();
        let r = check_concave_inequalities(&t, &p).unwrap();
        assert!(r.passed, "{:?}", r.violations);

        // Hand value at k = 1 for the small problem with constant g:
        // (0.25 - 1) * 1 + 1.5 * 1 * 1 * 0.25 = -0.375.
        let p4 = catalog::p4();
        let t4 = run_concave(
            &p4,
            &SolverParams {
                max_iter: 50,
                tol_theta: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        let r4 = &t4.records[0];
        let lhs = (r4.theta_next() - r4.theta) * r4.g_val
            + 1.5 * p4.lipschitz_l() * r4.theta * r4.step_norm * r4.step_norm;
        assert!((lhs + 0.375).abs() < 1e-12);
        assert!(check_concave_inequalities(&t4, &p4).unwrap().passed);
    }

    #[test]
    fn tampering_is_detected() {
        let (p, t) = p1_trace();
        let mut tampered = t.clone();
        tampered.records[1].x = Vector::scalar(0.123).unwrap();
        tampered.records[1].step_norm = 7.0;
        let r = check_concave_inequalities(&tampered, &p).unwrap();
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.k == 2));
    }

    #[test]
    fn wrong_solver_is_an_error() {
        let p = catalog::p1();
        let t = run_dinkelbach(
            &p,
            &SolverParams {
                max_iter: 20,
                tol_theta: 1e-12,
                ..Default::default()
            },
            &InnerParams::default(),
        )
        .unwrap();
        assert!(matches!(
            check_concave_inequalities(&t, &p),
            Err(Error::TraceMismatch(_))
        ));
    }

    #[test]
    fn fejer_and_rate_bound_on_p1() {
        let (p, t) = p1_trace();
        let o = grid_minimize(&p, 1_000_001).unwrap();
        assert!(check_fejer(&t, &p, &o).unwrap().passed);
        let r = check_rate_bound(&t, &p, &o).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        // Hand value: bound(1) = 0.4 (2 + 2*0.49)/1.51.
        let expected = 0.4 * (2.0 + 2.0 * 0.49) / 1.51;
        assert!((r.metrics["bound_at_k1"] - expected).abs() < 1e-6);
        assert!(r.metrics["tightness_ratio"] <= 1.0);
    }

    #[test]
    fn rate_bound_on_constant_denominator() {
        // bound(1) = theta_1 (M + L ||x_bar - x0||^2) / g(x_bar) = 1*(1+1)/1.
        let p = catalog::p4();
        let t = run_concave(
            &p,
            &SolverParams {
                max_iter: 50,
                ..Default::default()
            },
        )
        .unwrap();
        let o = grid_minimize(&p, 1_000_001).unwrap();
        let r = check_rate_bound(&t, &p, &o).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!((r.metrics["bound_at_k1"] - 2.0).abs() < 1e-9);
        // Observed excess at k = 1 is 0.25 <= 2.
        assert!((t.records[0].theta_next() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fejer_with_nonoptimal_point_is_informative() {
        let (p, t) = p1_trace();
        let fake = synthetic_oracle(0.5, Vector::scalar(0.1).unwrap(), 0.0);
        // Holds or fails depending on the point; must not error.
        let _ = check_fejer(&t, &p, &fake).unwrap();
    }

    #[test]
    fn fejer_requires_certified_oracle() {
        let (p, t) = p1_trace();
        let sloppy = synthetic_oracle(0.066, Vector::scalar(0.7).unwrap(), 1e-3);
        assert!(check_fejer(&t, &p, &sloppy).is_err());
    }

    #[test]
    fn convex_inequalities_on_p3() {
        let p = catalog::p3();
        let t = run_convex(
            &p,
            &StepPolicy::constant(1.0, true),
            &SolverParams {
                max_iter: 500,
                ..Default::default()
            },
        )
        .unwrap();
        let r = check_convex_inequalities(&t, &p).unwrap();
        assert!(r.passed, "{:?}", r.violations);

        // Hand value at k = 1: (theta2 - 0.48) g(x1) + step^2.
        let r1 = &t.records[0];
        let lhs = (r1.theta_next() - r1.theta) * r1.g_val + r1.step_norm * r1.step_norm / r1.eta;
        assert!((lhs + 0.149).abs() < 1e-3, "lhs = {lhs}");

        let t_geo = run_convex(
            &p,
            &StepPolicy::geometric(1.0, 0.999, true),
            &SolverParams {
                max_iter: 500,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(check_convex_inequalities(&t_geo, &p).unwrap().passed);

        let mut tampered = t.clone();
        tampered.records[0].eta = 17.0;
        assert!(!check_convex_inequalities(&tampered, &p).unwrap().passed);
    }

    #[test]
    fn sequence_lemmas_geometric_and_harmonic() {
        let n = 64;
        let a: Vec<f64> = (0..n).map(|k| 0.5_f64.powi(k as i32)).collect();
        let b = vec![0.0; n];
        let eps = vec![0.0; n];
        let r = check_sequence_lemmas(&a, &b, &eps).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert_eq!(r.metrics["hypotheses_met"], 1.0);
        assert!(r.metrics["contraction"] <= 0.5 + 1e-12);

        // Harmonic eps is not summable: flag raised, conclusions skipped.
        let eps_h: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let a_flat = vec![1.0; n];
        let r = check_sequence_lemmas(&a_flat, &b, &eps_h).unwrap();
        assert_eq!(r.metrics["hypotheses_met"], 0.0);

        // Mismatched lengths error.
        assert!(check_sequence_lemmas(&a, &b[..3], &eps).is_err());
    }

    #[test]
    fn sequence_lemmas_on_extracted_triple() {
        // Long horizon so the extracted distance sequence settles.
        let p = catalog::p1();
        let t = run_concave(
            &p,
            &SolverParams {
                max_iter: 500,
                ..Default::default()
            },
        )
        .unwrap();
        let o = grid_minimize(&p, 1_000_001).unwrap();
        let (a, b, eps) = sequence_triple_from_trace(&t, &p, &o).unwrap();
        let r = check_sequence_lemmas(&a, &b, &eps).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }

    #[test]
    fn cauchy_tail_checks() {
        let p = catalog::p3();
        let t = run_convex(
            &p,
            &StepPolicy::constant(1.0, true),
            &SolverParams {
                max_iter: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        let r = check_cauchy_tail(&t, 1000).unwrap();
        assert!(r.passed, "{:?}", r.metrics);

        // Collapsing concave run with a tiny floor keeps enough records for
        // a window of 3.
        let p4 = catalog::p4();
        let t4 = run_concave(
            &p4,
            &SolverParams {
                max_iter: 50,
                theta_floor: 1e-300,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(t4.len() > 6, "len = {}", t4.len());
        assert!(check_cauchy_tail(&t4, 3).unwrap().passed);

        // Oscillating synthetic trace fails.
        let mut osc = synthetic_trace(&[1.0; 9]);
        for r in osc.records.iter_mut() {
            r.step_norm = 0.5;
        }
        assert!(!check_cauchy_tail(&osc, 4).unwrap().passed);

        // Too-short trace is a precondition error.
        assert!(check_cauchy_tail(&osc, 5).is_err());
        assert!(check_cauchy_tail(&osc, 0).is_err());
    }
}

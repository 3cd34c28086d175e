//! Problem-instance assembly, construction-time invariants and the sampling
//! validator for the standing hypotheses on `f` and `g`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{check_descent_lemma, Curvature, ProxFn, SmoothFn};
use crate::vector::Vector;

/// Number of pseudo-random feasible points the validator probes.
pub const VALIDATION_SAMPLES: usize = 100;

/// Numerical slack on `f >= 0` absorbing floating-point cancellation.
pub const F_NONNEG_SLACK: f64 = 1e-12;

/// Numerical slack on `g <= M`.
pub const G_BOUND_SLACK: f64 = 1e-12;

/// Immutable bundle of `(f, S)`, `g`, the starting point and declared
/// constants. `new` enforces the construction invariants; `new_unchecked`
/// skips the value checks so validation workflows can inspect broken inputs.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemInstance {
    f: ProxFn,
    g: SmoothFn,
    x0: Vector,
    curvature: Curvature,
}

impl ProblemInstance {
    pub fn new(f: ProxFn, g: SmoothFn, x0: Vector, curvature: Curvature) -> Result<Self> {
        let inst = Self::new_unchecked(f, g, x0, curvature)?;
        if !inst.g.admits(curvature) {
            return Err(Error::InvalidInstance(format!(
                "denominator kind is not {curvature:?}"
            )));
        }
        if !inst.f.contains(&inst.x0)? {
            return Err(Error::InvalidInstance(
                "x0 must belong to the feasible set".into(),
            ));
        }
        let f0 = inst.f.eval(&inst.x0)?;
        if !f0.is_finite() || f0 < 0.0 {
            return Err(Error::InvalidInstance(format!(
                "f(x0) must be finite and nonnegative, got {f0}"
            )));
        }
        let g0 = inst.g.eval(&inst.x0)?;
        if !(g0 > 0.0 && g0 <= inst.bound_m()) {
            return Err(Error::InvalidInstance(format!(
                "g(x0) must satisfy 0 < g(x0) <= M, got g(x0) = {g0}, M = {}",
                inst.bound_m()
            )));
        }
        Ok(inst)
    }

    /// Builds the bundle checking only dimensional consistency. Intended for
    /// validator tests that need to observe hypothesis failures.
    pub fn new_unchecked(f: ProxFn, g: SmoothFn, x0: Vector, curvature: Curvature) -> Result<Self> {
        let dims = [f.dim(), g.dim(), Some(x0.dim())];
        let mut pinned = None;
        for d in dims.into_iter().flatten() {
            match pinned {
                None => pinned = Some(d),
                Some(p) if p != d => return Err(Error::DimensionMismatch(p, d)),
                _ => {}
            }
        }
        Ok(Self { f, g, x0, curvature })
    }

    pub fn f(&self) -> &ProxFn {
        &self.f
    }

    pub fn g(&self) -> &SmoothFn {
        &self.g
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.g.declared_l()
    }

    pub fn bound_m(&self) -> f64 {
        self.g.declared_m()
    }

    /// Replaces the starting point, re-running the construction checks.
    pub fn with_x0(&self, x0: Vector) -> Result<Self> {
        Self::new(self.f.clone(), self.g.clone(), x0, self.curvature)
    }

    /// Initial ratio `f(x0) / g(x0)`.
    pub fn theta0(&self) -> Result<f64> {
        Ok(self.f.eval(&self.x0)? / self.g.eval(&self.x0)?)
    }
}

/// One named pass/fail entry of a validation run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate_instance`]; failures are reported, never raised.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<CheckItem>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckItem {
            name: name.into(),
            passed,
            detail,
        });
    }
}

/// Spot-checks the standing hypotheses: membership and sign conditions at
/// `x0`, then `f >= 0`, `0 < g <= M` and the descent lemma (applied to `-g`
/// for a concave tag) at [`VALIDATION_SAMPLES`] seeded pseudo-random feasible
/// points. Global statements are sampled, not proved.
pub fn validate_instance(p: &ProblemInstance, seed: u64) -> ValidationReport {
    let mut report = ValidationReport {
        seed,
        checks: Vec::new(),
    };

    match p.f().contains(p.x0()) {
        Ok(true) => report.push("x0 in S", true, String::new()),
        Ok(false) => report.push("x0 in S", false, format!("x0 = {:?}", p.x0().as_slice())),
        Err(e) => report.push("x0 in S", false, e.to_string()),
    }

    match p.f().eval(p.x0()) {
        Ok(f0) if f0.is_finite() && f0 >= -F_NONNEG_SLACK => {
            report.push("f(x0) finite and nonnegative", true, format!("f(x0) = {f0}"));
        }
        Ok(f0) => report.push("f(x0) finite and nonnegative", false, format!("f(x0) = {f0}")),
        Err(e) => report.push("f(x0) finite and nonnegative", false, e.to_string()),
    }

    match p.g().eval(p.x0()) {
        Ok(g0) if g0 > 0.0 && g0 <= p.bound_m() + G_BOUND_SLACK => {
            report.push("0 < g(x0) <= M", true, format!("g(x0) = {g0}"));
        }
        Ok(g0) => report.push(
            "0 < g(x0) <= M",
            false,
            format!("g(x0) = {g0}, M = {}", p.bound_m()),
        ),
        Err(e) => report.push("0 < g(x0) <= M", false, e.to_string()),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vector> = (0..VALIDATION_SAMPLES)
        .map(|_| p.f().set().sample(p.dim(), &mut rng))
        .collect();

    let mut f_ok = true;
    let mut f_detail = String::new();
    for x in &samples {
        match p.f().eval(x) {
            Ok(v) if v >= -F_NONNEG_SLACK => {}
            Ok(v) => {
                f_ok = false;
                f_detail = format!("f = {v} at {:?}", x.as_slice());
                break;
            }
            Err(e) => {
                f_ok = false;
                f_detail = e.to_string();
                break;
            }
        }
    }
    report.push("f >= 0 at sampled points", f_ok, f_detail);

    let mut g_ok = true;
    let mut g_detail = String::new();
    for x in &samples {
        match p.g().eval(x) {
            Ok(v) if v > 0.0 && v <= p.bound_m() + G_BOUND_SLACK => {}
            Ok(v) => {
                g_ok = false;
                g_detail = format!("g = {v} at {:?} (M = {})", x.as_slice(), p.bound_m());
                break;
            }
            Err(e) => {
                g_ok = false;
                g_detail = e.to_string();
                break;
            }
        }
    }
    report.push("0 < g <= M at sampled points", g_ok, g_detail);

    let pairs: Vec<(Vector, Vector)> = samples
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    match check_descent_lemma(p.g(), p.lipschitz_l(), p.curvature(), &pairs) {
        Ok(ok) => report.push("descent lemma at sampled pairs", ok, String::new()),
        Err(e) => report.push("descent lemma at sampled pairs", false, e.to_string()),
    }

    report
}

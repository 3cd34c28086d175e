//! Run configuration: JSON documents naming a catalog problem or an inline
//! one, the solver and its stopping rules, and optional oracle settings.
//! Unknown fields are rejected so typos surface as parse errors.

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::functions::{Curvature, FeasibleSet, ProxFn, ProxKind, SmoothFn, SmoothKind};
use crate::instance::ProblemInstance;
use crate::solver::{InnerParams, SolverParams, StepPolicy, StepPolicyKind};
use crate::vector::Vector;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    /// Starting point; defaults to the catalog problem's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    /// Seed for the validator's feasible-point sampling.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemConfig {
    Catalog(String),
    Inline(InlineProblem),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub f: FnConfig,
    #[serde(rename = "S")]
    pub s: SetConfig,
    pub g: GConfig,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub curvature: Curvature,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FnConfig {
    AbsShiftedPlusConst { center: f64, offset: f64 },
    QuadShiftedPlusConst { center: f64, offset: f64 },
    L1PlusConst { center: Vec<f64>, offset: f64 },
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SetConfig {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    FullSpace,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum GConfig {
    ConcaveQuad { a: f64, center: f64, level: f64 },
    ConvexQuad { a: f64, center: f64, offset: f64 },
    Constant { value: f64 },
    Affine { slope: Vec<f64>, offset: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Concave,
    Convex,
    Dinkelbach,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Step policy for the convex solver; ignored elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_policy: Option<EtaPolicyConfig>,
    #[serde(default = "default_max_iter")]
    pub max_iter: u64,
    #[serde(default)]
    pub tol_theta: f64,
    #[serde(default)]
    pub tol_step: f64,
    #[serde(default = "default_theta_floor")]
    pub theta_floor: f64,
    /// Inner-loop controls for the parametric baseline; ignored elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<InnerConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EtaPolicyConfig {
    Constant {
        eta: f64,
        #[serde(default = "default_true")]
        safeguard: bool,
    },
    Geometric {
        eta1: f64,
        ratio: f64,
        #[serde(default = "default_true")]
        safeguard: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerConfig {
    #[serde(default = "default_inner_max_iter")]
    pub max_iter: u64,
    #[serde(default = "default_inner_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub n_points_per_dim: usize,
}

fn default_max_iter() -> u64 {
    500
}

fn default_theta_floor() -> f64 {
    1e-12
}

fn default_true() -> bool {
    true
}

fn default_inner_max_iter() -> u64 {
    10_000
}

fn default_inner_tol() -> f64 {
    1e-10
}

/// Everything a run needs, resolved from a parsed config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub instance: ProblemInstance,
    pub algorithm: Algorithm,
    pub params: SolverParams,
    pub policy: Option<StepPolicy>,
    pub inner: InnerParams,
    pub oracle_points: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Default configuration used by `--print-config` without an input file.
    pub fn default_config() -> Self {
        Self {
            problem: ProblemConfig::Catalog("P1".into()),
            x0: None,
            solver: SolverConfig {
                algorithm: Algorithm::Concave,
                eta_policy: None,
                max_iter: default_max_iter(),
                tol_theta: 0.0,
                tol_step: 0.0,
                theta_floor: default_theta_floor(),
                inner: None,
            },
            oracle: None,
            seed: 0,
        }
    }

    /// Same config with every default made explicit (starting point, inner
    /// controls, policy defaults), for `--print-config`.
    pub fn explicit(&self) -> Result<Self> {
        let resolved = self.resolve()?;
        let mut out = self.clone();
        out.x0 = Some(resolved.instance.x0().as_slice().to_vec());
        out.solver.max_iter = resolved.params.max_iter;
        out.solver.tol_theta = resolved.params.tol_theta;
        out.solver.tol_step = resolved.params.tol_step;
        out.solver.theta_floor = resolved.params.theta_floor;
        if matches!(resolved.algorithm, Algorithm::Dinkelbach) {
            out.solver.inner = Some(InnerConfig {
                max_iter: resolved.inner.max_iter,
                tol: resolved.inner.tol,
            });
        }
        if let (Algorithm::Convex, Some(policy)) = (&resolved.algorithm, &resolved.policy) {
            out.solver.eta_policy = Some(match policy.kind {
                StepPolicyKind::Constant { eta } => EtaPolicyConfig::Constant {
                    eta,
                    safeguard: policy.safeguard,
                },
                StepPolicyKind::Geometric { eta1, ratio } => EtaPolicyConfig::Geometric {
                    eta1,
                    ratio,
                    safeguard: policy.safeguard,
                },
            });
        }
        out.seed = resolved.seed;
        Ok(out)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let base = match &self.problem {
            ProblemConfig::Catalog(id) => catalog::by_id(id)?,
            ProblemConfig::Inline(inline) => inline.build()?,
        };
        let instance = match (&self.x0, &self.problem) {
            (Some(coords), _) => base.with_x0(Vector::new(coords.clone())?)?,
            (None, ProblemConfig::Catalog(_)) => base,
            (None, ProblemConfig::Inline(_)) => {
                return Err(Error::Config("inline problems require x0".into()))
            }
        };
        let params = SolverParams {
            max_iter: self.solver.max_iter,
            tol_theta: self.solver.tol_theta,
            tol_step: self.solver.tol_step,
            theta_floor: self.solver.theta_floor,
            assert_mode: false,
        };
        params.validate()?;
        let policy = match (&self.solver.algorithm, &self.solver.eta_policy) {
            (Algorithm::Convex, Some(EtaPolicyConfig::Constant { eta, safeguard })) => {
                Some(StepPolicy::constant(*eta, *safeguard))
            }
            (Algorithm::Convex, Some(EtaPolicyConfig::Geometric { eta1, ratio, safeguard })) => {
                Some(StepPolicy::geometric(*eta1, *ratio, *safeguard))
            }
            // The convex solver defaults to a conservative safeguarded step.
            (Algorithm::Convex, None) => {
                let theta1 = instance.theta0()?;
                let cap = 1.0 / instance.lipschitz_l();
                let eta = if theta1 > 0.0 { 0.5 * cap / theta1 } else { cap };
                Some(StepPolicy::constant(eta, true))
            }
            _ => None,
        };
        if let Some(p) = &policy {
            p.validate()?;
        }
        let inner = match &self.solver.inner {
            Some(c) => InnerParams {
                max_iter: c.max_iter,
                tol: c.tol,
            },
            None => InnerParams::default(),
        };
        inner.validate()?;
        if let Some(o) = &self.oracle {
            if o.n_points_per_dim < 2 {
                return Err(Error::Config(
                    "oracle n_points_per_dim must be >= 2".into(),
                ));
            }
        }
        Ok(Resolved {
            instance,
            algorithm: self.solver.algorithm.clone(),
            params,
            policy,
            inner,
            oracle_points: self.oracle.as_ref().map(|o| o.n_points_per_dim),
            seed: self.seed,
        })
    }
}

impl InlineProblem {
    fn build(&self) -> Result<ProblemInstance> {
        let set = match &self.s {
            SetConfig::Interval { lo, hi } => FeasibleSet::interval(*lo, *hi)?,
            SetConfig::Box { lo, hi } => {
                FeasibleSet::boxed(Vector::new(lo.clone())?, Vector::new(hi.clone())?)?
            }
            SetConfig::FullSpace => FeasibleSet::FullSpace,
        };
        let kind = match &self.f {
            FnConfig::AbsShiftedPlusConst { center, offset } => ProxKind::AbsShiftedPlusConst {
                center: *center,
                offset: *offset,
            },
            FnConfig::QuadShiftedPlusConst { center, offset } => ProxKind::QuadShiftedPlusConst {
                center: *center,
                offset: *offset,
            },
            FnConfig::L1PlusConst { center, offset } => ProxKind::L1PlusConst {
                center: Vector::new(center.clone())?,
                offset: *offset,
            },
            FnConfig::Zero => ProxKind::Zero,
        };
        let f = ProxFn::new(kind, set)?;
        let g_kind = match &self.g {
            GConfig::ConcaveQuad { a, center, level } => SmoothKind::ConcaveQuad {
                a: *a,
                center: *center,
                level: *level,
            },
            GConfig::ConvexQuad { a, center, offset } => SmoothKind::ConvexQuad {
                a: *a,
                center: *center,
                offset: *offset,
            },
            GConfig::Constant { value } => SmoothKind::Constant { value: *value },
            GConfig::Affine { slope, offset } => SmoothKind::Affine {
                slope: Vector::new(slope.clone())?,
                offset: *offset,
            },
        };
        let g = SmoothFn::new(g_kind, self.l, self.m)?;
        // The real x0 is attached by resolve(); build around a provisional
        // point with the value checks deferred to that step.
        let dim = f.dim().or(g.dim()).unwrap_or(1);
        let provisional = f.set().clamp(&Vector::new(vec![0.0; dim])?);
        ProblemInstance::new_unchecked(f, g, provisional, self.curvature)
    }
}

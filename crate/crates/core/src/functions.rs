//! Catalog of proximable numerators `(f, S)` and smooth denominators `g`.
//!
//! Every numerator kind is separable and every feasible set is an interval or
//! a box, so the joint proximal map over `f + indicator(S)` is closed-form:
//! a one-dimensional unconstrained prox per coordinate followed by a clamp.
//! Denominators are quadratics, constants or affine maps with exact gradients
//! and declared Lipschitz/bound constants.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Curvature tag of the denominator. Constant and affine denominators are
/// admitted under either tag; quadratics only under their natural one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Concave,
    Convex,
}

/// Feasible set `S`: a closed interval, a box, or the whole space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vector, hi: Vector },
    FullSpace,
}

/// Sampling window used for `FullSpace`, which has no bounds of its own.
pub const FULL_SPACE_SAMPLE_HALF_WIDTH: f64 = 10.0;

impl FeasibleSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidFunction(format!(
                "interval bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::Interval { lo, hi })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch(lo.dim(), hi.dim()));
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l >= h) {
            return Err(Error::InvalidFunction(
                "box bounds must satisfy lo < hi componentwise".into(),
            ));
        }
        Ok(Self::Box { lo, hi })
    }

    /// Dimension pinned by the set itself, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Interval { .. } => Some(1),
            Self::Box { lo, .. } => Some(lo.dim()),
            Self::FullSpace => None,
        }
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        self.check_dim(x)?;
        Ok(match self {
            Self::Interval { lo, hi } => x[0] >= *lo && x[0] <= *hi,
            Self::Box { lo, hi } => x
                .iter()
                .enumerate()
                .all(|(i, &c)| c >= lo[i] && c <= hi[i]),
            Self::FullSpace => true,
        })
    }

    /// Componentwise projection onto the set.
    pub fn clamp(&self, x: &Vector) -> Vector {
        let coords: Vec<f64> = match self {
            Self::Interval { lo, hi } => x.iter().map(|&c| c.clamp(*lo, *hi)).collect(),
            Self::Box { lo, hi } => x
                .iter()
                .enumerate()
                .map(|(i, &c)| c.clamp(lo[i], hi[i]))
                .collect(),
            Self::FullSpace => return x.clone(),
        };
        Vector::new(coords).expect("clamp of finite input is finite")
    }

    /// Bounds for grid enumeration; `None` for the whole space.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Self::Interval { lo, hi } => Some((vec![*lo], vec![*hi])),
            Self::Box { lo, hi } => Some((lo.as_slice().to_vec(), hi.as_slice().to_vec())),
            Self::FullSpace => None,
        }
    }

    /// Distance from `x` to the boundary of the set (infinite for the whole
    /// space, negative never occurs for feasible `x`).
    pub fn boundary_distance(&self, x: &Vector) -> f64 {
        match self {
            Self::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
            Self::Box { lo, hi } => x
                .iter()
                .enumerate()
                .map(|(i, &c)| (c - lo[i]).min(hi[i] - c))
                .fold(f64::INFINITY, f64::min),
            Self::FullSpace => f64::INFINITY,
        }
    }

    /// Uniform sample of the set. `FullSpace` is sampled on a centered box of
    /// half-width [`FULL_SPACE_SAMPLE_HALF_WIDTH`].
    pub fn sample<R: Rng>(&self, dim: usize, rng: &mut R) -> Vector {
        let coords: Vec<f64> = match self {
            Self::Interval { lo, hi } => vec![rng.gen_range(*lo..=*hi)],
            Self::Box { lo, hi } => (0..lo.dim()).map(|i| rng.gen_range(lo[i]..=hi[i])).collect(),
            Self::FullSpace => (0..dim)
                .map(|_| {
                    rng.gen_range(-FULL_SPACE_SAMPLE_HALF_WIDTH..=FULL_SPACE_SAMPLE_HALF_WIDTH)
                })
                .collect(),
        };
        Vector::new(coords).expect("sampled coordinates are finite")
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch(d, x.dim()));
            }
        }
        Ok(())
    }
}

/// Numerator kind. All kinds are coordinatewise separable with a nonnegative
/// offset so that `f >= 0` everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProxKind {
    /// `sum_i |x_i - center| + offset`, scalar center broadcast per coordinate.
    AbsShiftedPlusConst { center: f64, offset: f64 },
    /// `sum_i (x_i - center)^2 + offset`, scalar center broadcast.
    QuadShiftedPlusConst { center: f64, offset: f64 },
    /// `sum_i |x_i - center_i| + offset` with a per-coordinate center.
    L1PlusConst { center: Vector, offset: f64 },
    Zero,
}

impl ProxKind {
    fn offset(&self) -> f64 {
        match self {
            Self::AbsShiftedPlusConst { offset, .. }
            | Self::QuadShiftedPlusConst { offset, .. }
            | Self::L1PlusConst { offset, .. } => *offset,
            Self::Zero => 0.0,
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::L1PlusConst { center, .. } => Some(center.dim()),
            _ => None,
        }
    }
}

/// The pair `(f, S)`: a proximable numerator together with its feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxFn {
    kind: ProxKind,
    set: FeasibleSet,
}

impl ProxFn {
    pub fn new(kind: ProxKind, set: FeasibleSet) -> Result<Self> {
        if kind.offset() < 0.0 {
            return Err(Error::InvalidFunction(format!(
                "offset must be nonnegative so that f >= 0, got {}",
                kind.offset()
            )));
        }
        if !kind.offset().is_finite() {
            return Err(Error::InvalidFunction("offset must be finite".into()));
        }
        if let (Some(dk), Some(ds)) = (kind.dim(), set.dim()) {
            if dk != ds {
                return Err(Error::DimensionMismatch(dk, ds));
            }
        }
        Ok(Self { kind, set })
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    /// Dimension pinned by the kind or the set, if any.
    pub fn dim(&self) -> Option<usize> {
        self.kind.dim().or_else(|| self.set.dim())
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch(d, x.dim()));
            }
        }
        Ok(())
    }

    /// `f(x)`. Set membership is not folded in; all catalog kinds are
    /// finite-valued everywhere.
    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let v = match &self.kind {
            ProxKind::AbsShiftedPlusConst { center, offset } => {
                x.iter().map(|c| (c - center).abs()).sum::<f64>() + offset
            }
            ProxKind::QuadShiftedPlusConst { center, offset } => {
                x.iter().map(|c| (c - center) * (c - center)).sum::<f64>() + offset
            }
            ProxKind::L1PlusConst { center, offset } => {
                x.iter()
                    .zip(center.iter())
                    .map(|(c, a)| (c - a).abs())
                    .sum::<f64>()
                    + offset
            }
            ProxKind::Zero => 0.0,
        };
        Ok(v)
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        self.check_dim(x)?;
        self.set.contains(x)
    }

    /// Joint proximal map: the unique minimizer over `S` of
    /// `f(x) + ||x - y||^2 / (2 lambda)`.
    ///
    /// Computed coordinatewise: unconstrained 1-D prox (soft threshold for the
    /// absolute-value family, linear shrink for the quadratic) followed by a
    /// clamp to the interval/box. In one dimension the constrained minimizer
    /// of a convex function is the clamp of the unconstrained one.
    pub fn prox(&self, y: &Vector, lambda: f64) -> Result<Vector> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "prox step must be positive and finite, got {lambda}"
            )));
        }
        self.check_dim(y)?;
        let unconstrained: Vec<f64> = match &self.kind {
            ProxKind::AbsShiftedPlusConst { center, .. } => y
                .iter()
                .map(|&c| center + soft_threshold(c - center, lambda))
                .collect(),
            ProxKind::QuadShiftedPlusConst { center, .. } => y
                .iter()
                .map(|&c| (2.0 * lambda * center + c) / (2.0 * lambda + 1.0))
                .collect(),
            ProxKind::L1PlusConst { center, .. } => y
                .iter()
                .zip(center.iter())
                .map(|(&c, &a)| a + soft_threshold(c - a, lambda))
                .collect(),
            ProxKind::Zero => y.as_slice().to_vec(),
        };
        let v = Vector::new(unconstrained)?;
        Ok(self.set.clamp(&v))
    }
}

fn soft_threshold(t: f64, lambda: f64) -> f64 {
    if t > lambda {
        t - lambda
    } else if t < -lambda {
        t + lambda
    } else {
        0.0
    }
}

/// Denominator kind with exact closed-form gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SmoothKind {
    /// `level - a * ||x - center*1||^2`, `a > 0`.
    ConcaveQuad { a: f64, center: f64, level: f64 },
    /// `a * ||x - center*1||^2 + offset`, `a > 0`.
    ConvexQuad { a: f64, center: f64, offset: f64 },
    /// `value > 0` everywhere.
    Constant { value: f64 },
    /// `<slope, x> + offset`.
    Affine { slope: Vector, offset: f64 },
}

/// Smooth denominator `g` with its declared gradient-Lipschitz constant and
/// declared upper bound on `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothFn {
    kind: SmoothKind,
    declared_l: f64,
    declared_m: f64,
}

impl SmoothFn {
    /// `declared_l` must dominate the true gradient-Lipschitz constant of the
    /// kind (`2a` for quadratics, `0` for constant/affine).
    pub fn new(kind: SmoothKind, declared_l: f64, declared_m: f64) -> Result<Self> {
        if !(declared_l > 0.0 && declared_l.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "declared L must be positive and finite, got {declared_l}"
            )));
        }
        if !(declared_m > 0.0 && declared_m.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "declared M must be positive and finite, got {declared_m}"
            )));
        }
        let min_l = match &kind {
            SmoothKind::ConcaveQuad { a, .. } | SmoothKind::ConvexQuad { a, .. } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidFunction(format!(
                        "quadratic coefficient must be positive, got {a}"
                    )));
                }
                2.0 * a
            }
            SmoothKind::Constant { value } => {
                if !(*value > 0.0 && value.is_finite()) {
                    return Err(Error::InvalidFunction(format!(
                        "constant denominator must be positive, got {value}"
                    )));
                }
                0.0
            }
            SmoothKind::Affine { .. } => 0.0,
        };
        if declared_l < min_l {
            return Err(Error::InvalidFunction(format!(
                "declared L = {declared_l} understates the gradient Lipschitz constant {min_l}"
            )));
        }
        Ok(Self {
            kind,
            declared_l,
            declared_m,
        })
    }

    pub fn kind(&self) -> &SmoothKind {
        &self.kind
    }

    pub fn declared_l(&self) -> f64 {
        self.declared_l
    }

    pub fn declared_m(&self) -> f64 {
        self.declared_m
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            SmoothKind::Affine { slope, .. } => Some(slope.dim()),
            _ => None,
        }
    }

    /// Whether the kind is compatible with the given curvature tag.
    pub fn admits(&self, curvature: Curvature) -> bool {
        match (&self.kind, curvature) {
            (SmoothKind::ConcaveQuad { .. }, Curvature::Concave) => true,
            (SmoothKind::ConcaveQuad { .. }, Curvature::Convex) => false,
            (SmoothKind::ConvexQuad { .. }, Curvature::Convex) => true,
            (SmoothKind::ConvexQuad { .. }, Curvature::Concave) => false,
            (SmoothKind::Constant { .. } | SmoothKind::Affine { .. }, _) => true,
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch(d, x.dim()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let v = match &self.kind {
            SmoothKind::ConcaveQuad { a, center, level } => {
                level - a * x.iter().map(|c| (c - center) * (c - center)).sum::<f64>()
            }
            SmoothKind::ConvexQuad { a, center, offset } => {
                a * x.iter().map(|c| (c - center) * (c - center)).sum::<f64>() + offset
            }
            SmoothKind::Constant { value } => *value,
            SmoothKind::Affine { slope, offset } => x.dot(slope)? + offset,
        };
        Ok(v)
    }

    pub fn grad(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let coords: Vec<f64> = match &self.kind {
            SmoothKind::ConcaveQuad { a, center, .. } => {
                x.iter().map(|c| -2.0 * a * (c - center)).collect()
            }
            SmoothKind::ConvexQuad { a, center, .. } => {
                x.iter().map(|c| 2.0 * a * (c - center)).collect()
            }
            SmoothKind::Constant { .. } => vec![0.0; x.dim()],
            SmoothKind::Affine { slope, .. } => slope.as_slice().to_vec(),
        };
        Vector::new(coords)
    }
}

/// Slack absorbing floating-point noise in per-pair descent-lemma checks.
pub const DESCENT_LEMMA_SLACK: f64 = 1e-10;

/// Quadratic upper-bound check: `h(y) <= h(x) + <grad h(x), y - x> + L/2 ||y - x||^2`
/// at every pair, where `h = g` for a convex tag and `h = -g` for a concave tag.
pub fn check_descent_lemma(
    g: &SmoothFn,
    l: f64,
    curvature: Curvature,
    pairs: &[(Vector, Vector)],
) -> Result<bool> {
    // Concave g satisfies the bound through -g.
    let sign = match curvature {
        Curvature::Concave => -1.0,
        Curvature::Convex => 1.0,
    };
    for (x, y) in pairs {
        let hx = sign * g.eval(x)?;
        let hy = sign * g.eval(y)?;
        let grad_x = g.grad(x)?.scale(sign);
        let diff = y.sub(x);
        let rhs = hx + grad_x.dot(&diff)? + 0.5 * l * diff.dot(&diff)?;
        if hy > rhs + DESCENT_LEMMA_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Max absolute error between the central finite difference and the exact
/// gradient, over all coordinates.
pub fn fd_gradient_check(g: &SmoothFn, x: &Vector, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let grad = g.grad(x)?;
    let mut max_err = 0.0_f64;
    for i in 0..x.dim() {
        let mut fwd = x.as_slice().to_vec();
        fwd[i] += h;
        let mut bwd = x.as_slice().to_vec();
        bwd[i] -= h;
        let fd = (g.eval(&Vector::new(fwd)?)? - g.eval(&Vector::new(bwd)?)?) / (2.0 * h);
        max_err = max_err.max((fd - grad[i]).abs());
    }
    Ok(max_err)
}

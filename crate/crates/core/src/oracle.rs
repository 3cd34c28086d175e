//! Brute-force ground truth: exhaustive grid search for the optimal ratio on
//! low-dimensional interval/box sets, and a fine-grid prox oracle used to
//! validate the closed-form proximal maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{ProxFn, ProxKind, SmoothKind};
use crate::instance::ProblemInstance;
use crate::vector::Vector;

/// Largest grid the enumerator will walk (nodes across all dimensions).
pub const MAX_GRID_NODES: u64 = 100_000_000;

/// Grid-search result. `certified_gap` is an upper bound on
/// `theta_bar - inf f/g`: the reported value can overshoot the true infimum
/// by at most this much.
#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub theta_bar: f64,
    pub x_bar: Vector,
    /// Largest grid spacing across dimensions.
    pub resolution: f64,
    pub certified_gap: f64,
}

struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    spacing: Vec<f64>,
    n: usize,
    dim: usize,
}

impl Grid {
    fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(j, &i)| self.lo[j] + i as f64 * self.spacing[j])
            .collect()
    }

    /// Advances a row-major multi-index; row-major order is lexicographic, so
    /// keeping the first strict minimum yields the lexicographically smallest
    /// argmin regardless of evaluation order.
    fn advance(&self, idx: &mut [usize], n: usize) -> bool {
        for j in (0..self.dim).rev() {
            idx[j] += 1;
            if idx[j] < n {
                return true;
            }
            idx[j] = 0;
        }
        false
    }
}

/// Exhaustively minimizes `f/g` over an endpoint-inclusive uniform grid.
///
/// Supports dimensions up to 3 on interval/box sets. The certified gap is
/// computed from exact per-cell extrema of the separable catalog functions:
/// over each grid cell, `min f / max g` lower-bounds the objective, so the
/// reported ratio exceeds the true infimum by at most
/// `theta_bar - min over cells of (min f / max g)`.
pub fn grid_minimize(p: &ProblemInstance, n_points_per_dim: usize) -> Result<OracleResult> {
    let dim = p.dim();
    if dim > 3 {
        return Err(Error::Unsupported(format!(
            "grid search supports dimension <= 3, got {dim}"
        )));
    }
    if n_points_per_dim < 2 {
        return Err(Error::InvalidParams(
            "grid needs at least 2 points per dimension".into(),
        ));
    }
    let (lo, hi) = p
        .f()
        .set()
        .bounds()
        .ok_or_else(|| Error::Unsupported("grid search needs a bounded set".into()))?;
    let total = (n_points_per_dim as u64).pow(dim as u32);
    if total > MAX_GRID_NODES {
        return Err(Error::Unsupported(format!(
            "grid of {total} nodes exceeds the {MAX_GRID_NODES} cap"
        )));
    }

    let n = n_points_per_dim;
    let spacing: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) / (n - 1) as f64)
        .collect();
    let grid = Grid {
        lo,
        hi,
        spacing,
        n,
        dim,
    };

    let mut best = f64::INFINITY;
    let mut best_idx = vec![0usize; dim];
    let mut idx = vec![0usize; dim];
    loop {
        let x = Vector::new(grid.node(&idx))?;
        let ratio = p.f().eval(&x)? / p.g().eval(&x)?;
        if ratio < best {
            best = ratio;
            best_idx.copy_from_slice(&idx);
        }
        if !grid.advance(&mut idx, n) {
            break;
        }
    }
    let x_bar = Vector::new(grid.node(&best_idx))?;
    let theta_bar = p.f().eval(&x_bar)? / p.g().eval(&x_bar)?;

    let lower = cell_lower_bound(p, &grid)?;
    let certified_gap = (theta_bar - lower).max(0.0);
    let resolution = grid.spacing.iter().cloned().fold(0.0, f64::max);

    Ok(OracleResult {
        theta_bar,
        x_bar,
        resolution,
        certified_gap,
    })
}

/// Min over all grid cells of `min_cell f / max_cell g`, a global lower bound
/// on the objective over the boxed set.
fn cell_lower_bound(p: &ProblemInstance, grid: &Grid) -> Result<f64> {
    let cells = grid.n - 1;
    let mut lower = f64::INFINITY;
    let mut idx = vec![0usize; grid.dim];
    loop {
        let cl: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(j, &i)| grid.lo[j] + i as f64 * grid.spacing[j])
            .collect();
        let ch: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                if i + 1 == cells {
                    grid.hi[j]
                } else {
                    grid.lo[j] + (i + 1) as f64 * grid.spacing[j]
                }
            })
            .collect();
        let f_min = f_min_on_cell(p.f().kind(), &cl, &ch);
        let g_max = g_max_on_cell(p.g().kind(), &cl, &ch);
        let bound = if g_max > 0.0 {
            f_min / g_max
        } else {
            f64::NEG_INFINITY
        };
        if bound < lower {
            lower = bound;
        }
        if !grid.advance(&mut idx, cells) {
            break;
        }
    }
    Ok(lower)
}

fn dist_min(c: f64, lo: f64, hi: f64) -> f64 {
    if c < lo {
        lo - c
    } else if c > hi {
        c - hi
    } else {
        0.0
    }
}

fn dist_max_sq(c: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - c) * (lo - c);
    let b = (hi - c) * (hi - c);
    a.max(b)
}

fn f_min_on_cell(kind: &ProxKind, cl: &[f64], ch: &[f64]) -> f64 {
    match kind {
        ProxKind::AbsShiftedPlusConst { center, offset } => {
            cl.iter()
                .zip(ch)
                .map(|(&l, &h)| dist_min(*center, l, h))
                .sum::<f64>()
                + offset
        }
        ProxKind::QuadShiftedPlusConst { center, offset } => {
            cl.iter()
                .zip(ch)
                .map(|(&l, &h)| {
                    let d = dist_min(*center, l, h);
                    d * d
                })
                .sum::<f64>()
                + offset
        }
        ProxKind::L1PlusConst { center, offset } => {
            cl.iter()
                .zip(ch)
                .zip(center.iter())
                .map(|((&l, &h), &c)| dist_min(c, l, h))
                .sum::<f64>()
                + offset
        }
        ProxKind::Zero => 0.0,
    }
}

fn g_max_on_cell(kind: &SmoothKind, cl: &[f64], ch: &[f64]) -> f64 {
    match kind {
        SmoothKind::ConcaveQuad { a, center, level } => {
            let min_sq: f64 = cl
                .iter()
                .zip(ch)
                .map(|(&l, &h)| {
                    let d = dist_min(*center, l, h);
                    d * d
                })
                .sum();
            level - a * min_sq
        }
        SmoothKind::ConvexQuad { a, center, offset } => {
            let max_sq: f64 = cl
                .iter()
                .zip(ch)
                .map(|(&l, &h)| dist_max_sq(*center, l, h))
                .sum();
            a * max_sq + offset
        }
        SmoothKind::Constant { value } => *value,
        SmoothKind::Affine { slope, offset } => {
            cl.iter()
                .zip(ch)
                .zip(slope.iter())
                .map(|((&l, &h), &w)| (w * l).max(w * h))
                .sum::<f64>()
                + offset
        }
    }
}

/// One-dimensional grid argmin of `f(x) + indicator(S) + (x - y)^2 / (2 lambda)`
/// over `[lo, hi]`. Validation oracle for the closed-form prox.
pub fn grid_prox(
    f: &ProxFn,
    y: f64,
    lambda: f64,
    n_points: usize,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if n_points < 2 {
        return Err(Error::InvalidParams(
            "prox grid needs at least 2 points".into(),
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!(
            "prox step must be positive, got {lambda}"
        )));
    }
    if let Some(d) = f.dim() {
        if d != 1 {
            return Err(Error::Unsupported(format!(
                "grid prox is one-dimensional, function has dimension {d}"
            )));
        }
    }
    let h = (hi - lo) / (n_points - 1) as f64;
    let mut best = f64::INFINITY;
    let mut best_x = f64::NAN;
    for i in 0..n_points {
        let xi = lo + i as f64 * h;
        let xv = Vector::scalar(xi)?;
        if !f.contains(&xv)? {
            continue;
        }
        let obj = f.eval(&xv)? + (xi - y) * (xi - y) / (2.0 * lambda);
        if obj < best {
            best = obj;
            best_x = xi;
        }
    }
    if best_x.is_nan() {
        return Err(Error::InvalidParams(
            "prox grid does not intersect the feasible set".into(),
        ));
    }
    Ok(best_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::functions::FeasibleSet;

    #[test]
    fn p1_oracle_finds_kink() {
        let o = grid_minimize(&catalog::p1(), 1_000_001).unwrap();
        assert!((o.theta_bar - 0.1 / 1.51).abs() < 1e-6);
        assert!((o.x_bar[0] - 0.7).abs() < 1e-6);
        assert!(o.certified_gap < 1e-5, "gap = {}", o.certified_gap);
    }

    #[test]
    fn p3_oracle_matches_stationarity_root() {
        let o = grid_minimize(&catalog::p3(), 1_000_001).unwrap();
        let x_star = 0.1 + 1.01_f64.sqrt();
        assert!((o.x_bar[0] - x_star).abs() < 1e-5);
        assert!((o.theta_bar - 0.19003).abs() < 1e-4);
    }

    #[test]
    fn p4_oracle_is_zero() {
        let o = grid_minimize(&catalog::p4(), 100_001).unwrap();
        assert!(o.theta_bar.abs() < 1e-9);
        assert!(o.x_bar[0].abs() < 1e-5);
        assert!(o.certified_gap < 1e-5);
    }

    #[test]
    fn p2_oracle_hits_center_node() {
        let o = grid_minimize(&catalog::p2(), 1001).unwrap();
        assert!((o.x_bar[0] - 0.3).abs() < 1e-9);
        assert!((o.x_bar[1] + 0.2).abs() < 1e-9);
        assert!((o.theta_bar - 0.05 / 3.935).abs() < 1e-9);
        assert!(o.certified_gap < 1e-5, "gap = {}", o.certified_gap);
    }

    #[test]
    fn unsupported_inputs() {
        let p = catalog::p1();
        assert!(matches!(
            grid_minimize(&p, 1),
            Err(Error::InvalidParams(_))
        ));

        // Unbounded set.
        let f = ProxFn::new(
            crate::functions::ProxKind::QuadShiftedPlusConst {
                center: 0.0,
                offset: 0.0,
            },
            FeasibleSet::FullSpace,
        )
        .unwrap();
        let g = crate::functions::SmoothFn::new(
            crate::functions::SmoothKind::Constant { value: 1.0 },
            1.0,
            1.0,
        )
        .unwrap();
        let inst = ProblemInstance::new(
            f,
            g,
            Vector::scalar(0.5).unwrap(),
            crate::functions::Curvature::Concave,
        )
        .unwrap();
        assert!(matches!(
            grid_minimize(&inst, 101),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn grid_prox_examples() {
        let l1 = ProxFn::new(
            crate::functions::ProxKind::L1PlusConst {
                center: Vector::scalar(0.0).unwrap(),
                offset: 0.0,
            },
            FeasibleSet::FullSpace,
        )
        .unwrap();
        let x = grid_prox(&l1, 3.0, 1.0, 1_000_001, -5.0, 5.0).unwrap();
        assert!((x - 2.0).abs() < 1e-5);

        // Grid aligned with S so the active boundary sits on a node.
        let proj = ProxFn::new(
            crate::functions::ProxKind::Zero,
            FeasibleSet::interval(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let x = grid_prox(&proj, 5.0, 0.1, 100_001, -1.0, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-5);

        let abs = ProxFn::new(
            crate::functions::ProxKind::AbsShiftedPlusConst {
                center: 0.7,
                offset: 0.1,
            },
            FeasibleSet::interval(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let x = grid_prox(&abs, 0.0, 0.3125, 1_000_001, -1.0, 2.0).unwrap();
        assert!((x - 0.3125).abs() < 1e-5);

        assert!(grid_prox(&abs, 0.0, 0.5, 1, -1.0, 2.0).is_err());
        assert!(grid_prox(&abs, 0.0, 0.0, 101, -1.0, 2.0).is_err());
        // Grid entirely outside the feasible set.
        assert!(grid_prox(&abs, 0.0, 0.5, 101, 2.0, 3.0).is_err());
    }

    #[test]
    fn refinement_never_raises_theta_beyond_gap() {
        for inst in [catalog::p1(), catalog::p3()] {
            let coarse = grid_minimize(&inst, 10_001).unwrap();
            let fine = grid_minimize(&inst, 20_001).unwrap();
            assert!(fine.theta_bar <= coarse.theta_bar + coarse.certified_gap + 1e-15);
            assert!(coarse.theta_bar <= fine.theta_bar + coarse.certified_gap + 1e-15);
        }
    }
}

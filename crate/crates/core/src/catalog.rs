//! Named test problems with closed-form optima used across the test suite
//! and addressable by string id from config files.

use crate::error::{Error, Result};
use crate::functions::{Curvature, FeasibleSet, ProxFn, ProxKind, SmoothFn, SmoothKind};
use crate::instance::ProblemInstance;
use crate::vector::Vector;

/// `f = |x - 0.7| + 0.1` on `S = [0, 1]`, `g = 2 - x^2`, concave.
/// Optimum at `x = 0.7` with ratio `0.1 / 1.51`.
pub fn p1() -> ProblemInstance {
    let f = ProxFn::new(
        ProxKind::AbsShiftedPlusConst {
            center: 0.7,
            offset: 0.1,
        },
        FeasibleSet::interval(0.0, 1.0).expect("fixed catalog bounds"),
    )
    .expect("fixed catalog definition");
    let g = SmoothFn::new(
        SmoothKind::ConcaveQuad {
            a: 1.0,
            center: 0.0,
            level: 2.0,
        },
        2.0,
        2.0,
    )
    .expect("fixed catalog definition");
    ProblemInstance::new(f, g, Vector::scalar(0.0).unwrap(), Curvature::Concave)
        .expect("catalog problem is well-formed")
}

/// Two-dimensional: `f = |x1 - 0.3| + |x2 + 0.2| + 0.05` on the unit box,
/// `g = 4 - 0.5 ||x||^2`, concave. Optimum at `(0.3, -0.2)`.
pub fn p2() -> ProblemInstance {
    let f = ProxFn::new(
        ProxKind::L1PlusConst {
            center: Vector::new(vec![0.3, -0.2]).unwrap(),
            offset: 0.05,
        },
        FeasibleSet::boxed(
            Vector::new(vec![-1.0, -1.0]).unwrap(),
            Vector::new(vec![1.0, 1.0]).unwrap(),
        )
        .expect("fixed catalog bounds"),
    )
    .expect("fixed catalog definition");
    let g = SmoothFn::new(
        SmoothKind::ConcaveQuad {
            a: 0.5,
            center: 0.0,
            level: 4.0,
        },
        1.0,
        4.0,
    )
    .expect("fixed catalog definition");
    ProblemInstance::new(
        f,
        g,
        Vector::new(vec![0.0, 0.0]).unwrap(),
        Curvature::Concave,
    )
    .expect("catalog problem is well-formed")
}

/// `f = (x - 1)^2 + 0.2` on `S = [0.5, 2]`, `g = 0.5 x^2 + 0.5`, convex.
/// Critical point at the root of `x^2 - 0.2 x - 1 = 0` inside `S`.
pub fn p3() -> ProblemInstance {
    let f = ProxFn::new(
        ProxKind::QuadShiftedPlusConst {
            center: 1.0,
            offset: 0.2,
        },
        FeasibleSet::interval(0.5, 2.0).expect("fixed catalog bounds"),
    )
    .expect("fixed catalog definition");
    let g = SmoothFn::new(
        SmoothKind::ConvexQuad {
            a: 0.5,
            center: 0.0,
            offset: 0.5,
        },
        1.0,
        2.5,
    )
    .expect("fixed catalog definition");
    ProblemInstance::new(f, g, Vector::scalar(2.0).unwrap(), Curvature::Convex)
        .expect("catalog problem is well-formed")
}

/// `f = x^2` on `S = [-1, 1]` with `g = 1`: optimal ratio is exactly zero,
/// exercising the degenerate-curvature path (constant gradient).
pub fn p4() -> ProblemInstance {
    let f = ProxFn::new(
        ProxKind::QuadShiftedPlusConst {
            center: 0.0,
            offset: 0.0,
        },
        FeasibleSet::interval(-1.0, 1.0).expect("fixed catalog bounds"),
    )
    .expect("fixed catalog definition");
    let g = SmoothFn::new(SmoothKind::Constant { value: 1.0 }, 1.0, 1.0).expect("fixed catalog definition");
    ProblemInstance::new(f, g, Vector::scalar(1.0).unwrap(), Curvature::Concave)
        .expect("catalog problem is well-formed")
}

pub const IDS: [&str; 4] = ["P1", "P2", "P3", "P4"];

/// Looks up a catalog problem by id (`P1` .. `P4`).
pub fn by_id(id: &str) -> Result<ProblemInstance> {
    match id {
        "P1" => Ok(p1()),
        "P2" => Ok(p2()),
        "P3" => Ok(p3()),
        "P4" => Ok(p4()),
        other => Err(Error::Config(format!(
            "unknown catalog problem '{other}' (known: {})",
            IDS.join(", ")
        ))),
    }
}

/// All concave-tagged catalog problems.
pub fn concave_ids() -> Vec<&'static str> {
    vec!["P1", "P2", "P4"]
}

//! Property tests for the algebraic invariants: inner-product bilinearity,
//! prox feasibility and nonexpansiveness, the quadratic upper bound, and
//! ratio monotonicity across random starts.

use proptest::prelude::*;

use fracprox::catalog;
use fracprox::functions::{
    check_descent_lemma, Curvature, FeasibleSet, ProxFn, ProxKind, SmoothFn, SmoothKind,
};
use fracprox::solver::{run_concave, run_convex, SolverParams, StepPolicy};
use fracprox::vector::{dot, Vector};

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 3)
}

#[test]
fn concurrent_solves_are_deterministic() {
    let runs: Vec<String> = std::thread::scope(|scope| {
        (0..4)
            .map(|_| {
                scope.spawn(|| {
                    let t = run_concave(
                        &catalog::p1(),
                        &SolverParams {
                            max_iter: 100,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    fracprox::cli::trace_to_csv(&t)
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap())
            .collect()
    });
    for w in runs.windows(2) {
        assert_eq!(w[0], w[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dot_is_symmetric_and_bilinear(a in vec3(), b in vec3(), c in vec3(), alpha in -5.0..5.0f64) {
        let va = Vector::new(a).unwrap();
        let vb = Vector::new(b).unwrap();
        let vc = Vector::new(c).unwrap();
        prop_assert!((dot(&va, &vb).unwrap() - dot(&vb, &va).unwrap()).abs() <= 1e-12);
        let lhs = dot(&va.scale(alpha).add_scaled(1.0, &vb), &vc).unwrap();
        let rhs = alpha * dot(&va, &vc).unwrap() + dot(&vb, &vc).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn prox_stays_feasible_and_nonexpansive(
        y1 in -10.0..10.0f64,
        y2 in -10.0..10.0f64,
        lambda in 0.01..5.0f64,
        center in -2.0..2.0f64,
        which in 0..3usize,
    ) {
        let kind = match which {
            0 => ProxKind::AbsShiftedPlusConst { center, offset: 0.1 },
            1 => ProxKind::QuadShiftedPlusConst { center, offset: 0.0 },
            _ => ProxKind::Zero,
        };
        let f = ProxFn::new(kind, FeasibleSet::interval(-1.5, 1.5).unwrap()).unwrap();
        let p1 = f.prox(&Vector::scalar(y1).unwrap(), lambda).unwrap();
        let p2 = f.prox(&Vector::scalar(y2).unwrap(), lambda).unwrap();
        prop_assert!(f.contains(&p1).unwrap());
        prop_assert!(f.contains(&p2).unwrap());
        prop_assert!((p1[0] - p2[0]).abs() <= (y1 - y2).abs() + 1e-10);
    }

    #[test]
    fn quadratic_upper_bound_holds_with_declared_constant(
        a in 0.1..3.0f64,
        center in -2.0..2.0f64,
        x in -3.0..3.0f64,
        y in -3.0..3.0f64,
        headroom in 0.0..2.0f64,
    ) {
        let g = SmoothFn::new(
            SmoothKind::ConvexQuad { a, center, offset: 0.5 },
            2.0 * a + headroom,
            100.0,
        )
        .unwrap();
        let pairs = vec![(Vector::scalar(x).unwrap(), Vector::scalar(y).unwrap())];
        prop_assert!(check_descent_lemma(&g, g.declared_l(), Curvature::Convex, &pairs).unwrap());
        // Understating the constant breaks the bound on separated pairs.
        if (x - y).abs() > 0.5 {
            prop_assert!(!check_descent_lemma(&g, 0.5 * a, Curvature::Convex, &pairs).unwrap());
        }
    }

    #[test]
    fn concave_ratios_never_increase(start in 0.01..1.0f64) {
        let p = catalog::p1().with_x0(Vector::scalar(start).unwrap()).unwrap();
        let t = run_concave(&p, &SolverParams { max_iter: 60, ..Default::default() }).unwrap();
        for w in t.records.windows(2) {
            prop_assert!(w[1].theta <= w[0].theta + 1e-12);
        }
    }

    #[test]
    fn convex_ratios_never_increase_for_any_step(start in 0.5..2.0f64, eta in 0.05..4.0f64) {
        let p = catalog::p3().with_x0(Vector::scalar(start).unwrap()).unwrap();
        let t = run_convex(
            &p,
            &StepPolicy::constant(eta, false),
            &SolverParams { max_iter: 60, ..Default::default() },
        )
        .unwrap();
        for w in t.records.windows(2) {
            prop_assert!(w[1].theta <= w[0].theta + 1e-12);
        }
    }
}

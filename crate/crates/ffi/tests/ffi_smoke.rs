//! Exercises the C ABI through its exported functions: handle lifecycle,
//! solve/trace/oracle/verify flows and the error-reporting paths.

use std::ffi::{CStr, CString};
use std::ptr;

use fracprox_ffi::*;

unsafe fn last_error() -> String {
    let ptr = fracprox_last_error_message();
    assert!(!ptr.is_null(), "expected an error message");
    let msg = CStr::from_ptr(ptr).to_string_lossy().into_owned();
    fracprox_string_free(ptr);
    msg
}

unsafe fn catalog(id: &str) -> *mut FpInstance {
    let id = CString::new(id).unwrap();
    let mut inst: *mut FpInstance = ptr::null_mut();
    let status = fracprox_instance_catalog(id.as_ptr(), &mut inst);
    assert_eq!(status, FpStatus::Ok);
    assert!(!inst.is_null());
    inst
}

#[test]
fn version_is_a_static_string() {
    let v = fracprox_version();
    assert!(!v.is_null());
    let text = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert!(text.contains('.'));
}

#[test]
fn solve_concave_and_read_trace() {
    unsafe {
        let inst = catalog("P1");
        assert_eq!(fracprox_instance_dim(inst), 1);
        assert_eq!(fracprox_instance_validate(inst, 7), FpStatus::Ok);

        let mut trace: *mut FpTrace = ptr::null_mut();
        let status = fracprox_solve_concave(inst, 500, 1e-12, 0.0, 1e-12, &mut trace);
        assert_eq!(status, FpStatus::Ok);
        let len = fracprox_trace_len(trace);
        assert!(len >= 2);

        let mut theta = f64::NAN;
        assert_eq!(fracprox_trace_theta_final(trace, &mut theta), FpStatus::Ok);
        assert!((theta - 0.1 / 1.51).abs() < 1e-6);

        let mut rec = FpRecord {
            k: 0,
            theta: 0.0,
            eta: 0.0,
            f_val: 0.0,
            g_val: 0.0,
            step_norm: 0.0,
            residual_norm: 0.0,
        };
        assert_eq!(fracprox_trace_record(trace, 0, &mut rec), FpStatus::Ok);
        assert_eq!(rec.k, 1);
        assert!((rec.theta - 0.4).abs() < 1e-12);
        assert!((rec.eta - 0.625).abs() < 1e-12);

        let mut x = [f64::NAN];
        assert_eq!(fracprox_trace_x(trace, len - 1, x.as_mut_ptr(), 1), FpStatus::Ok);
        assert!((x[0] - 0.7).abs() < 1e-4);

        // Wrong buffer length is rejected.
        let mut big = [0.0; 3];
        assert_eq!(
            fracprox_trace_x(trace, 0, big.as_mut_ptr(), 3),
            FpStatus::Config
        );

        let mut csv: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(fracprox_trace_csv(trace, &mut csv), FpStatus::Ok);
        let text = CStr::from_ptr(csv).to_string_lossy().into_owned();
        assert!(text.starts_with("k,theta,eta,f_val,g_val,step_norm,residual_norm,x0"));
        fracprox_string_free(csv);

        fracprox_trace_free(trace);
        fracprox_instance_free(inst);
    }
}

#[test]
fn zero_ratio_termination_is_visible() {
    unsafe {
        let inst = catalog("P4");
        let mut trace: *mut FpTrace = ptr::null_mut();
        assert_eq!(
            fracprox_solve_concave(inst, 50, 1e-14, 0.0, 1e-12, &mut trace),
            FpStatus::Ok
        );
        let mut term = FpTermination::Diverged;
        assert_eq!(fracprox_trace_termination(trace, &mut term), FpStatus::Ok);
        assert!(matches!(
            term,
            FpTermination::OptimalValueZero | FpTermination::ThetaTolReached
        ));
        fracprox_trace_free(trace);
        fracprox_instance_free(inst);
    }
}

#[test]
fn convex_solver_safeguard_and_fixed_point() {
    unsafe {
        let inst = catalog("P3");
        let mut trace: *mut FpTrace = ptr::null_mut();
        // Oversized first step is rejected by the safeguard.
        let status = fracprox_solve_convex(inst, 3.0, 1.0, 1, 100, 0.0, 0.0, &mut trace);
        assert_eq!(status, FpStatus::Config);
        assert!(last_error().contains("η₁θ₁ < 1/L"));

        // A compliant step converges to the interior critical point.
        assert_eq!(
            fracprox_solve_convex(inst, 1.0, 1.0, 1, 2000, 0.0, 0.0, &mut trace),
            FpStatus::Ok
        );
        let mut theta = f64::NAN;
        assert_eq!(fracprox_trace_theta_final(trace, &mut theta), FpStatus::Ok);
        assert!((theta - 0.19003).abs() < 1e-4);
        fracprox_trace_free(trace);
        fracprox_instance_free(inst);
    }
}

#[test]
fn dinkelbach_agrees_with_direct_scheme() {
    unsafe {
        let inst = catalog("P2");
        let mut direct: *mut FpTrace = ptr::null_mut();
        let mut baseline: *mut FpTrace = ptr::null_mut();
        assert_eq!(
            fracprox_solve_concave(inst, 500, 1e-13, 0.0, 1e-12, &mut direct),
            FpStatus::Ok
        );
        assert_eq!(
            fracprox_solve_dinkelbach(inst, 200, 1e-13, 10_000, 1e-10, &mut baseline),
            FpStatus::Ok
        );
        let mut a = f64::NAN;
        let mut b = f64::NAN;
        fracprox_trace_theta_final(direct, &mut a);
        fracprox_trace_theta_final(baseline, &mut b);
        assert!((a - b).abs() < 1e-5);
        fracprox_trace_free(direct);
        fracprox_trace_free(baseline);
        fracprox_instance_free(inst);
    }
}

#[test]
fn oracle_and_verify_round_trip() {
    unsafe {
        let inst = catalog("P1");
        let mut theta = f64::NAN;
        let mut gap = f64::NAN;
        let mut x = [f64::NAN];
        assert_eq!(
            fracprox_oracle_grid_minimize(inst, 100_001, &mut theta, &mut gap, x.as_mut_ptr(), 1),
            FpStatus::Ok
        );
        assert!((theta - 0.1 / 1.51).abs() < 1e-6);
        assert!(gap < 1e-5);
        assert!((x[0] - 0.7).abs() < 1e-5);

        let mut trace: *mut FpTrace = ptr::null_mut();
        assert_eq!(
            fracprox_solve_concave(inst, 500, 0.0, 0.0, 1e-12, &mut trace),
            FpStatus::Ok
        );
        let mut report: *mut std::ffi::c_char = ptr::null_mut();
        let status = fracprox_verify(inst, trace, 100_001, 7, &mut report);
        assert_eq!(status, FpStatus::Ok);
        let text = CStr::from_ptr(report).to_string_lossy().into_owned();
        assert!(text.contains("\"all_passed\": true"), "{text}");
        assert!(text.contains("rate_bound"));
        fracprox_string_free(report);
        fracprox_trace_free(trace);
        fracprox_instance_free(inst);
    }
}

#[test]
fn with_x0_rejects_infeasible_points() {
    unsafe {
        let inst = catalog("P1");
        let coords = [2.0];
        let mut out: *mut FpInstance = ptr::null_mut();
        let status = fracprox_instance_with_x0(inst, coords.as_ptr(), 1, &mut out);
        assert_eq!(status, FpStatus::Config);
        assert!(last_error().contains("feasible set"));

        let good = [0.5];
        assert_eq!(
            fracprox_instance_with_x0(inst, good.as_ptr(), 1, &mut out),
            FpStatus::Ok
        );
        fracprox_instance_free(out);
        fracprox_instance_free(inst);
    }
}

#[test]
fn error_paths_report_cleanly() {
    unsafe {
        // Unknown catalog id.
        let id = CString::new("P9").unwrap();
        let mut inst: *mut FpInstance = ptr::null_mut();
        assert_eq!(
            fracprox_instance_catalog(id.as_ptr(), &mut inst),
            FpStatus::Config
        );
        assert!(last_error().contains("unknown catalog problem"));

        // Null arguments.
        assert_eq!(
            fracprox_instance_catalog(ptr::null(), &mut inst),
            FpStatus::NullArgument
        );
        let good = CString::new("P1").unwrap();
        assert_eq!(
            fracprox_instance_catalog(good.as_ptr(), ptr::null_mut()),
            FpStatus::NullArgument
        );

        // Free of null handles is a no-op.
        fracprox_instance_free(ptr::null_mut());
        fracprox_trace_free(ptr::null_mut());
        fracprox_string_free(ptr::null_mut());
    }
}

#[test]
fn config_json_constructor_matches_cli_schema() {
    unsafe {
        let json = CString::new(
            r#"{
                "problem": {
                    "f": {"kind": "QuadShiftedPlusConst", "center": 1.0, "offset": 0.2},
                    "S": {"kind": "Interval", "lo": 0.5, "hi": 2.0},
                    "g": {"kind": "ConvexQuad", "a": 0.5, "center": 0.0, "offset": 0.5},
                    "L": 1.0,
                    "M": 2.5,
                    "curvature": "convex"
                },
                "x0": [2.0],
                "solver": {"algorithm": "convex"}
            }"#,
        )
        .unwrap();
        let mut inst: *mut FpInstance = ptr::null_mut();
        assert_eq!(
            fracprox_instance_from_config_json(json.as_ptr(), &mut inst),
            FpStatus::Ok
        );
        assert_eq!(fracprox_instance_dim(inst), 1);
        fracprox_instance_free(inst);

        let bad = CString::new(r#"{"problem": "P1"}"#).unwrap();
        assert_eq!(
            fracprox_instance_from_config_json(bad.as_ptr(), &mut inst),
            FpStatus::Config
        );
    }
}

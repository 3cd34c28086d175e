//! C ABI over the fracprox solvers.
//!
//! Conventions: every constructor hands back an opaque handle through an out
//! parameter and returns a status code; `FP_STATUS_OK` is zero. Strings
//! returned by the library are heap-allocated and must be released with
//! [`fracprox_string_free`]; handles with their matching `_free` function.
//! On any non-OK status, [`fracprox_last_error_message`] returns a
//! description of what went wrong.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracprox::cli;
use fracprox::config::RunConfig;
use fracprox::error::Error;
use fracprox::instance::{validate_instance, ProblemInstance};
use fracprox::oracle::grid_minimize;
use fracprox::solver::{
    run_concave, run_convex, run_dinkelbach, InnerParams, SolverParams, StepPolicy,
};
use fracprox::trace::{RunTrace, Termination};
use fracprox::vector::Vector;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// Malformed input: config, parameters, dimensions, safeguards.
    Config = 3,
    /// A standing hypothesis on f or g failed.
    Hypothesis = 4,
    /// The operation is outside the supported envelope (dimension, set).
    Unsupported = 5,
    /// Verification ran and at least one check failed.
    Verify = 6,
    /// Internal failure (panic caught at the boundary).
    Internal = 7,
}

/// Why a run stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpTermination {
    ThetaTolReached = 0,
    StepTolReached = 1,
    MaxIter = 2,
    OptimalValueZero = 3,
    Diverged = 4,
}

/// One iteration record (the iterate itself is read via `fracprox_trace_x`).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FpRecord {
    pub k: u64,
    pub theta: f64,
    pub eta: f64,
    pub f_val: f64,
    pub g_val: f64,
    pub step_norm: f64,
    pub residual_norm: f64,
}

/// Opaque problem handle.
pub struct FpInstance(ProblemInstance);

/// Opaque trace handle.
pub struct FpTrace(RunTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FpStatus {
    match e {
        Error::Hypothesis(_) | Error::InlineDiagnostic(_) => FpStatus::Hypothesis,
        Error::Unsupported(_) => FpStatus::Unsupported,
        _ => FpStatus::Config,
    }
}

fn fail(e: Error) -> FpStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn guarded(body: impl FnOnce() -> FpStatus) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic at the library boundary".into());
            FpStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, FpStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(FpStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        FpStatus::Utf8
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn fracprox_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Description of the most recent failure on this thread, or null when the
/// last call succeeded. Free with `fracprox_string_free`.
#[no_mangle]
pub extern "C" fn fracprox_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string allocated by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn fracprox_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a named catalog problem (`P1` .. `P4`).
///
/// # Safety
/// `id` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_catalog(
    id: *const c_char,
    out: *mut *mut FpInstance,
) -> FpStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer".into());
            return FpStatus::NullArgument;
        }
        let id = match read_str(id) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match fracprox::catalog::by_id(id) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(FpInstance(p)));
                FpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds a problem from a full run-config JSON document (the same format
/// the CLI consumes); only the problem/x0 sections are used.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_from_config_json(
    json: *const c_char,
    out: *mut *mut FpInstance,
) -> FpStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer".into());
            return FpStatus::NullArgument;
        }
        let text = match read_str(json) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let cfg = match RunConfig::from_json(text) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        match cfg.resolve() {
            Ok(resolved) => {
                *out = Box::into_raw(Box::new(FpInstance(resolved.instance)));
                FpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Clone of the instance with a different starting point.
///
/// # Safety
/// `inst` must be a live instance handle, `coords` must point at `len`
/// doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_with_x0(
    inst: *const FpInstance,
    coords: *const f64,
    len: usize,
    out: *mut *mut FpInstance,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || coords.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let slice = std::slice::from_raw_parts(coords, len);
        let x0 = match Vector::new(slice.to_vec()) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        match (*inst).0.with_x0(x0) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(FpInstance(p)));
                FpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Problem dimension; zero for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_dim(inst: *const FpInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    (*inst).0.dim()
}

/// Samples the standing hypotheses; `FP_STATUS_OK` when every check passed,
/// `FP_STATUS_HYPOTHESIS` otherwise (details in the last error message).
///
/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_validate(
    inst: *const FpInstance,
    seed: u64,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() {
            set_error("null instance".into());
            return FpStatus::NullArgument;
        }
        let report = validate_instance(&(*inst).0, seed);
        if report.all_passed() {
            FpStatus::Ok
        } else {
            let failed: Vec<String> = report
                .failures()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            set_error(failed.join("; "));
            FpStatus::Hypothesis
        }
    })
}

/// Releases an instance handle. Null is a no-op.
///
/// # Safety
/// `inst` must be null or a live instance handle; it is consumed.
#[no_mangle]
pub unsafe extern "C" fn fracprox_instance_free(inst: *mut FpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

unsafe fn emit_trace(
    result: Result<RunTrace, Error>,
    out: *mut *mut FpTrace,
) -> FpStatus {
    match result {
        Ok(t) => {
            *out = Box::into_raw(Box::new(FpTrace(t)));
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Adaptive-step solver for concave denominators.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_solve_concave(
    inst: *const FpInstance,
    max_iter: u64,
    tol_theta: f64,
    tol_step: f64,
    theta_floor: f64,
    out: *mut *mut FpTrace,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let params = SolverParams {
            max_iter,
            tol_theta,
            tol_step,
            theta_floor,
            assert_mode: false,
        };
        emit_trace(run_concave(&(*inst).0, &params), out)
    })
}

/// Step-policy solver for convex denominators. `ratio = 1` is a constant
/// step, `ratio < 1` a geometric schedule; `safeguard != 0` enforces
/// `eta_1 * theta_1 < 1/L` at start.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_solve_convex(
    inst: *const FpInstance,
    eta1: f64,
    ratio: f64,
    safeguard: i32,
    max_iter: u64,
    tol_theta: f64,
    tol_step: f64,
    out: *mut *mut FpTrace,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let policy = if ratio == 1.0 {
            StepPolicy::constant(eta1, safeguard != 0)
        } else {
            StepPolicy::geometric(eta1, ratio, safeguard != 0)
        };
        let params = SolverParams {
            max_iter,
            tol_theta,
            tol_step,
            theta_floor: 1e-12,
            assert_mode: false,
        };
        emit_trace(run_convex(&(*inst).0, &policy, &params), out)
    })
}

/// Parametric baseline with a nested proximal-gradient subproblem solve.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_solve_dinkelbach(
    inst: *const FpInstance,
    max_iter: u64,
    tol_theta: f64,
    inner_max_iter: u64,
    inner_tol: f64,
    out: *mut *mut FpTrace,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let params = SolverParams {
            max_iter,
            tol_theta,
            tol_step: 0.0,
            theta_floor: 1e-12,
            assert_mode: false,
        };
        let inner = InnerParams {
            max_iter: inner_max_iter,
            tol: inner_tol,
        };
        emit_trace(run_dinkelbach(&(*inst).0, &params, &inner), out)
    })
}

/// Number of records in the trace; zero for a null handle.
///
/// # Safety
/// `trace` must be null or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_len(trace: *const FpTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).0.len()
}

/// Termination reason.
///
/// # Safety
/// `trace` must be a live trace handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_termination(
    trace: *const FpTrace,
    out: *mut FpTermination,
) -> FpStatus {
    guarded(|| {
        if trace.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        *out = match (*trace).0.termination {
            Termination::ThetaTolReached => FpTermination::ThetaTolReached,
            Termination::StepTolReached => FpTermination::StepTolReached,
            Termination::MaxIter => FpTermination::MaxIter,
            Termination::OptimalValueZero => FpTermination::OptimalValueZero,
            Termination::Diverged => FpTermination::Diverged,
        };
        FpStatus::Ok
    })
}

/// Scalar fields of record `idx` (0-based).
///
/// # Safety
/// `trace` must be a live trace handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_record(
    trace: *const FpTrace,
    idx: usize,
    out: *mut FpRecord,
) -> FpStatus {
    guarded(|| {
        if trace.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let records = &(*trace).0.records;
        if idx >= records.len() {
            set_error(format!("record index {idx} out of range {}", records.len()));
            return FpStatus::Config;
        }
        let r = &records[idx];
        *out = FpRecord {
            k: r.k,
            theta: r.theta,
            eta: r.eta,
            f_val: r.f_val,
            g_val: r.g_val,
            step_norm: r.step_norm,
            residual_norm: r.residual_norm,
        };
        FpStatus::Ok
    })
}

/// Copies the iterate of record `idx` into `buf` (which must hold exactly
/// the problem dimension).
///
/// # Safety
/// `trace` must be a live trace handle and `buf` must point at `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_x(
    trace: *const FpTrace,
    idx: usize,
    buf: *mut f64,
    len: usize,
) -> FpStatus {
    guarded(|| {
        if trace.is_null() || buf.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let records = &(*trace).0.records;
        if idx >= records.len() {
            set_error(format!("record index {idx} out of range {}", records.len()));
            return FpStatus::Config;
        }
        let x = records[idx].x.as_slice();
        if len != x.len() {
            set_error(format!("buffer holds {len} values, iterate has {}", x.len()));
            return FpStatus::Config;
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(x);
        FpStatus::Ok
    })
}

/// Ratio at the final iterate.
///
/// # Safety
/// `trace` must be a live trace handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_theta_final(
    trace: *const FpTrace,
    out: *mut f64,
) -> FpStatus {
    guarded(|| {
        if trace.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        *out = (*trace).0.theta_final();
        FpStatus::Ok
    })
}

/// The trace serialized to the CSV contract. Free with
/// `fracprox_string_free`.
///
/// # Safety
/// `trace` must be a live trace handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_csv(
    trace: *const FpTrace,
    out: *mut *mut c_char,
) -> FpStatus {
    guarded(|| {
        if trace.is_null() || out.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        *out = export_string(cli::trace_to_csv(&(*trace).0));
        FpStatus::Ok
    })
}

/// Releases a trace handle. Null is a no-op.
///
/// # Safety
/// `trace` must be null or a live trace handle; it is consumed.
#[no_mangle]
pub unsafe extern "C" fn fracprox_trace_free(trace: *mut FpTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Exhaustive grid search over the feasible box: optimal ratio, certified
/// discretization gap, and the minimizer written into `x_buf`.
///
/// # Safety
/// `inst` must be a live instance handle; `out_theta`, `out_gap` valid
/// pointers; `x_buf` must point at `x_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracprox_oracle_grid_minimize(
    inst: *const FpInstance,
    n_points_per_dim: usize,
    out_theta: *mut f64,
    out_gap: *mut f64,
    x_buf: *mut f64,
    x_len: usize,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || out_theta.is_null() || out_gap.is_null() || x_buf.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let p = &(*inst).0;
        if x_len != p.dim() {
            set_error(format!("buffer holds {x_len} values, problem dimension is {}", p.dim()));
            return FpStatus::Config;
        }
        match grid_minimize(p, n_points_per_dim) {
            Ok(o) => {
                *out_theta = o.theta_bar;
                *out_gap = o.certified_gap;
                std::slice::from_raw_parts_mut(x_buf, x_len).copy_from_slice(o.x_bar.as_slice());
                FpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Replays every applicable check on the trace and returns the JSON report
/// through `report_out` (free with `fracprox_string_free`). Grid-backed
/// checks run only when `oracle_points > 0`. Returns `FP_STATUS_OK` when all
/// checks passed and `FP_STATUS_VERIFY` when at least one failed; the report
/// is written in both cases.
///
/// # Safety
/// `inst` and `trace` must be live handles; `report_out` may be null when
/// the caller only wants the status.
#[no_mangle]
pub unsafe extern "C" fn fracprox_verify(
    inst: *const FpInstance,
    trace: *const FpTrace,
    oracle_points: usize,
    seed: u64,
    report_out: *mut *mut c_char,
) -> FpStatus {
    guarded(|| {
        if inst.is_null() || trace.is_null() {
            set_error("null argument".into());
            return FpStatus::NullArgument;
        }
        let oracle = if oracle_points > 0 {
            Some(oracle_points)
        } else {
            None
        };
        match cli::verify_trace(&(*inst).0, &(*trace).0, oracle, seed) {
            Ok(report) => {
                if !report_out.is_null() {
                    let text = serde_json::to_string_pretty(&report)
                        .unwrap_or_else(|_| "{}".into());
                    *report_out = export_string(text);
                }
                if report.all_passed {
                    FpStatus::Ok
                } else {
                    set_error("one or more checks failed; see the report".into());
                    FpStatus::Verify
                }
            }
            Err(e) => fail(e),
        }
    })
}

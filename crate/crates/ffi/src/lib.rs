//! C ABI for the negcurv solvers.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_lookup`
//! and released by the matching `*_free`. Fallible calls return a
//! [`NegcurvCode`]; the message of the most recent failure on the calling
//! thread is available from [`negcurv_last_error`]. Strings returned by the
//! library are owned by the caller and released with [`negcurv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DVector;
use negcurv::problems::{lookup, Problem};
use negcurv::{Error, Mode, RunRecord, SolverConfig, Status};

/// Result code of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegcurvCode {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    UnknownProblem = 4,
    InvalidConfig = 5,
    DimensionMismatch = 6,
    SolverError = 7,
    Panic = 8,
}

/// Termination status of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegcurvStatus {
    FirstOrder = 0,
    SecondOrder = 1,
    MaxIter = 2,
    NumericFailure = 3,
}

impl From<Status> for NegcurvStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::FirstOrder => NegcurvStatus::FirstOrder,
            Status::SecondOrder => NegcurvStatus::SecondOrder,
            Status::MaxIter => NegcurvStatus::MaxIter,
            Status::NumericFailure => NegcurvStatus::NumericFailure,
        }
    }
}

/// A test problem with its starting point.
pub struct NegcurvProblem(Problem);

/// Solver parameters.
pub struct NegcurvConfig(SolverConfig);

/// Outcome of a solve.
pub struct NegcurvRun(RunRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(NegcurvCode, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownProblem(_) | Error::InvalidDimension { .. } => {
                NegcurvCode::UnknownProblem
            }
            Error::InvalidConfig(_) => NegcurvCode::InvalidConfig,
            Error::DimensionMismatch { .. } => NegcurvCode::DimensionMismatch,
            Error::NonFinite(_) => NegcurvCode::InvalidArgument,
            _ => NegcurvCode::SolverError,
        };
        Failure(code, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a code plus a stored message.
fn guard<F>(f: F) -> NegcurvCode
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NegcurvCode::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("panic inside negcurv".into());
            NegcurvCode::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(NegcurvCode::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            NegcurvCode::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn negcurv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn negcurv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn negcurv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a registered problem by spec, `name` or `name:n`.
///
/// # Safety
/// `spec` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_problem_lookup(
    spec: *const c_char,
    out: *mut *mut NegcurvProblem,
) -> NegcurvCode {
    guard(|| {
        let spec = text(spec, "spec")?;
        store(out, NegcurvProblem(lookup(spec)?))
    })
}

/// Dimension of the problem, 0 for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_problem_dim(problem: *const NegcurvProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.dim())
}

/// Replaces the starting point with `x[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `x` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn negcurv_problem_set_start(
    problem: *mut NegcurvProblem,
    x: *const f64,
    len: usize,
) -> NegcurvCode {
    guard(|| {
        let p = borrow_mut(problem, "problem")?;
        if x.is_null() {
            return Err(null("x"));
        }
        let x = std::slice::from_raw_parts(x, len);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Failure(
                NegcurvCode::InvalidArgument,
                "starting point has non-finite entries".into(),
            ));
        }
        p.0 = p.0.clone().with_start(DVector::from_column_slice(x))?;
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn negcurv_problem_free(problem: *mut NegcurvProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Default configuration for `mode` (`an2c`, `an2e`, `soan2c`, `soan2e`, `ar2`).
///
/// # Safety
/// `mode` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_config_new(
    mode: *const c_char,
    out: *mut *mut NegcurvConfig,
) -> NegcurvCode {
    guard(|| {
        let mode: Mode = text(mode, "mode")?.parse()?;
        store(out, NegcurvConfig(SolverConfig::with_mode(mode)))
    })
}

/// Configuration from a JSON object; missing fields take their defaults.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_config_from_json(
    json: *const c_char,
    out: *mut *mut NegcurvConfig,
) -> NegcurvCode {
    guard(|| {
        let json = text(json, "json")?;
        let cfg: SolverConfig = serde_json::from_str(json).map_err(|e| {
            Failure(
                NegcurvCode::InvalidConfig,
                format!("invalid configuration: {e}"),
            )
        })?;
        cfg.validate()?;
        store(out, NegcurvConfig(cfg))
    })
}

/// Sets a numeric field by its JSON name (`eps1`, `sigma0`, `kappa_C`,
/// `max_iter`, `theta_sub`, ...). The configuration is left unchanged if the
/// result does not validate.
///
/// # Safety
/// `config` must be a live handle; `key` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn negcurv_config_set(
    config: *mut NegcurvConfig,
    key: *const c_char,
    value: f64,
) -> NegcurvCode {
    guard(|| {
        let cfg = borrow_mut(config, "config")?;
        let key = text(key, "key")?;
        let mut obj = serde_json::to_value(&cfg.0).expect("config serializes");
        let map = obj.as_object_mut().expect("config is an object");
        if key == "theta_sub" {
            map.entry(key).or_insert(serde_json::Value::Null);
        }
        let slot = map.get_mut(key).ok_or_else(|| {
            Failure(
                NegcurvCode::InvalidArgument,
                format!("unknown numeric field `{key}`"),
            )
        })?;
        let is_integer = slot.is_u64();
        let is_numeric = slot.is_number() || key == "theta_sub";
        if !is_numeric {
            return Err(Failure(
                NegcurvCode::InvalidArgument,
                format!("field `{key}` is not numeric"),
            ));
        }
        *slot = if is_integer {
            if !(value >= 0.0 && value.fract() == 0.0 && value <= 1e15) {
                return Err(Failure(
                    NegcurvCode::InvalidConfig,
                    format!("`{key}` must be a nonnegative integer, got {value}"),
                ));
            }
            serde_json::json!(value as u64)
        } else {
            serde_json::Number::from_f64(value)
                .map(serde_json::Value::Number)
                .ok_or_else(|| {
                    Failure(
                        NegcurvCode::InvalidConfig,
                        format!("`{key}` must be finite, got {value}"),
                    )
                })?
        };
        let next: SolverConfig = serde_json::from_value(obj).map_err(|e| {
            Failure(
                NegcurvCode::InvalidConfig,
                format!("invalid configuration: {e}"),
            )
        })?;
        next.validate()?;
        cfg.0 = next;
        Ok(())
    })
}

/// Configuration as JSON; release with [`negcurv_string_free`]. NULL on a NULL handle.
///
/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_config_to_json(config: *const NegcurvConfig) -> *mut c_char {
    match config.as_ref() {
        Some(c) => owned_string(serde_json::to_string(&c.0).expect("config serializes")),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn negcurv_config_free(config: *mut NegcurvConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Solves `problem` from its starting point. A run that stops at `max_iter`
/// or on numeric failure still returns `Ok` with a run handle; inspect it with
/// [`negcurv_run_status`].
///
/// # Safety
/// `problem` and `config` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn negcurv_solve(
    problem: *const NegcurvProblem,
    config: *const NegcurvConfig,
    out: *mut *mut NegcurvRun,
) -> NegcurvCode {
    guard(|| {
        let p = borrow(problem, "problem")?;
        let c = borrow(config, "config")?;
        store(out, NegcurvRun(negcurv::solve(&p.0, &c.0)?))
    })
}

/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_status(run: *const NegcurvRun) -> NegcurvStatus {
    match run.as_ref() {
        Some(r) => r.0.status.into(),
        None => NegcurvStatus::NumericFailure,
    }
}

/// Iterations taken, 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_iterations(run: *const NegcurvRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.iterations)
}

/// Final objective value, NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_f_final(run: *const NegcurvRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.0.f_final)
}

/// Final gradient norm, NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_grad_norm(run: *const NegcurvRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.0.grad_norm_final)
}

/// Copies the final iterate into `x[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `x` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_x_final(
    run: *const NegcurvRun,
    x: *mut f64,
    len: usize,
) -> NegcurvCode {
    guard(|| {
        let r = borrow(run, "run")?;
        if x.is_null() {
            return Err(null("x"));
        }
        let src = &r.0.x_final;
        if src.len() != len {
            return Err(Error::DimensionMismatch {
                expected: src.len(),
                got: len,
            }
            .into());
        }
        std::slice::from_raw_parts_mut(x, len).copy_from_slice(src);
        Ok(())
    })
}

/// Full run record as JSON; release with [`negcurv_string_free`]. NULL on a NULL handle.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_to_json(run: *const NegcurvRun) -> *mut c_char {
    match run.as_ref() {
        Some(r) => owned_string(r.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `run` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn negcurv_run_free(run: *mut NegcurvRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

use std::ffi::{CStr, CString};
use std::ptr;

use negcurv_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = negcurv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn problem(spec: &str) -> *mut NegcurvProblem {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { negcurv_problem_lookup(c(spec).as_ptr(), &mut p) },
        NegcurvCode::Ok
    );
    p
}

fn config(mode: &str) -> *mut NegcurvConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { negcurv_config_new(c(mode).as_ptr(), &mut cfg) },
        NegcurvCode::Ok
    );
    cfg
}

fn config_json(cfg: *const NegcurvConfig) -> serde_json::Value {
    unsafe {
        let s = negcurv_config_to_json(cfg);
        let v = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        negcurv_string_free(s);
        v
    }
}

#[test]
fn solve_round_trip_matches_core() {
    let p = problem("rosenbr:10");
    let cfg = config("an2c");
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(negcurv_solve(p, cfg, &mut run), NegcurvCode::Ok);
        assert_eq!(negcurv_run_status(run), NegcurvStatus::FirstOrder);

        let core = negcurv::solve(
            &negcurv::problems::lookup("rosenbr:10").unwrap(),
            &negcurv::SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(negcurv_run_iterations(run), core.iterations);
        assert_eq!(negcurv_run_f_final(run), core.f_final);
        assert_eq!(negcurv_run_grad_norm(run), core.grad_norm_final);

        let mut x = vec![0.0; 10];
        assert_eq!(
            negcurv_run_x_final(run, x.as_mut_ptr(), 10),
            NegcurvCode::Ok
        );
        assert_eq!(x, core.x_final);
        assert_eq!(
            negcurv_run_x_final(run, x.as_mut_ptr(), 9),
            NegcurvCode::DimensionMismatch
        );

        let json = negcurv_run_to_json(run);
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        negcurv_string_free(json);
        assert_eq!(v["status"], "first_order");
        assert_eq!(v["algo"], "an2c");

        negcurv_run_free(run);
        negcurv_config_free(cfg);
        negcurv_problem_free(p);
    }
}

#[test]
fn max_iter_is_a_run_not_an_error() {
    let p = problem("rosenbr:10");
    let cfg = config("an2e");
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(
            negcurv_config_set(cfg, c("max_iter").as_ptr(), 3.0),
            NegcurvCode::Ok
        );
        assert_eq!(negcurv_solve(p, cfg, &mut run), NegcurvCode::Ok);
        assert_eq!(negcurv_run_status(run), NegcurvStatus::MaxIter);
        assert_eq!(negcurv_run_iterations(run), 3);
        negcurv_run_free(run);
        negcurv_config_free(cfg);
        negcurv_problem_free(p);
    }
}

#[test]
fn config_set_validates_and_keeps_old_value() {
    let cfg = config("soan2e");
    unsafe {
        assert_eq!(
            negcurv_config_set(cfg, c("kappa_C").as_ptr(), 1e6),
            NegcurvCode::Ok
        );
        assert_eq!(
            negcurv_config_set(cfg, c("theta_sub").as_ptr(), 0.05),
            NegcurvCode::Ok
        );
        assert_eq!(
            negcurv_config_set(cfg, c("eta2").as_ptr(), 1e-6),
            NegcurvCode::InvalidConfig
        );
        assert!(last_error().contains("eta"), "{}", last_error());
        assert_eq!(
            negcurv_config_set(cfg, c("max_iter").as_ptr(), 2.5),
            NegcurvCode::InvalidConfig
        );
        assert_eq!(
            negcurv_config_set(cfg, c("sigma0").as_ptr(), f64::NAN),
            NegcurvCode::InvalidConfig
        );
        assert_eq!(
            negcurv_config_set(cfg, c("mode").as_ptr(), 1.0),
            NegcurvCode::InvalidArgument
        );
        assert_eq!(
            negcurv_config_set(cfg, c("nope").as_ptr(), 1.0),
            NegcurvCode::InvalidArgument
        );
    }
    let v = config_json(cfg);
    assert_eq!(v["mode"], "soan2e");
    assert_eq!(v["kappa_C"], 1e6);
    assert_eq!(v["theta_sub"], 0.05);
    assert_eq!(v["eta2"], 0.95);
    unsafe { negcurv_config_free(cfg) };
}

#[test]
fn config_from_json() {
    let mut cfg = ptr::null_mut();
    unsafe {
        let json = c(r#"{"mode": "ar2", "eps1": 1e-7}"#);
        assert_eq!(
            negcurv_config_from_json(json.as_ptr(), &mut cfg),
            NegcurvCode::Ok
        );
        let v = config_json(cfg);
        assert_eq!(v["mode"], "ar2");
        assert_eq!(v["eps1"], 1e-7);
        assert_eq!(v["gamma2"], 10.0);
        negcurv_config_free(cfg);

        let mut bad = ptr::null_mut();
        let json = c(r#"{"mode": "newton"}"#);
        assert_eq!(
            negcurv_config_from_json(json.as_ptr(), &mut bad),
            NegcurvCode::InvalidConfig
        );
        assert!(bad.is_null());
        let json = c(r#"{"sigma0": -1}"#);
        assert_eq!(
            negcurv_config_from_json(json.as_ptr(), &mut bad),
            NegcurvCode::InvalidConfig
        );
    }
}

#[test]
fn null_and_bad_inputs() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            negcurv_problem_lookup(ptr::null(), &mut p),
            NegcurvCode::NullPointer
        );
        assert_eq!(
            negcurv_problem_lookup(c("rosenbr").as_ptr(), ptr::null_mut()),
            NegcurvCode::NullPointer
        );
        assert_eq!(
            negcurv_problem_lookup(c("missing").as_ptr(), &mut p),
            NegcurvCode::UnknownProblem
        );
        assert!(last_error().contains("missing"));
        assert_eq!(
            negcurv_problem_lookup(c("rosenbr:1").as_ptr(), &mut p),
            NegcurvCode::UnknownProblem
        );
        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(
            negcurv_problem_lookup(invalid.as_ptr().cast(), &mut p),
            NegcurvCode::InvalidUtf8
        );
        assert!(p.is_null());

        let mut cfg = ptr::null_mut();
        assert_eq!(
            negcurv_config_new(c("trust-region").as_ptr(), &mut cfg),
            NegcurvCode::InvalidConfig
        );
        let mut run = ptr::null_mut();
        assert_eq!(
            negcurv_solve(ptr::null(), ptr::null(), &mut run),
            NegcurvCode::NullPointer
        );
        assert!(run.is_null());

        assert_eq!(negcurv_problem_dim(ptr::null()), 0);
        assert!(negcurv_run_f_final(ptr::null()).is_nan());
        assert!(negcurv_run_to_json(ptr::null()).is_null());
        assert!(negcurv_config_to_json(ptr::null()).is_null());
        negcurv_problem_free(ptr::null_mut());
        negcurv_config_free(ptr::null_mut());
        negcurv_run_free(ptr::null_mut());
        negcurv_string_free(ptr::null_mut());
    }
}

#[test]
fn custom_start() {
    let p = problem("saddle2");
    let cfg = config("soan2c");
    let start = [0.5, 0.0];
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(
            negcurv_problem_set_start(p, [f64::NAN, 0.0].as_ptr(), 2),
            NegcurvCode::InvalidArgument
        );
        assert_eq!(
            negcurv_problem_set_start(p, [0.5, 0.0, 0.0].as_ptr(), 3),
            NegcurvCode::DimensionMismatch
        );
        assert_eq!(
            negcurv_problem_set_start(p, start.as_ptr(), 2),
            NegcurvCode::Ok
        );
        assert_eq!(negcurv_solve(p, cfg, &mut run), NegcurvCode::Ok);
        let json = negcurv_run_to_json(run);
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        negcurv_string_free(json);
        assert_eq!(v["trace"][0]["step_tag"], "conv");
        negcurv_run_free(run);
        negcurv_config_free(cfg);
        negcurv_problem_free(p);
    }
}

#[test]
fn errors_are_per_thread() {
    let mut p = ptr::null_mut();
    unsafe { negcurv_problem_lookup(c("first-missing").as_ptr(), &mut p) };
    std::thread::spawn(|| {
        let mut p = ptr::null_mut();
        unsafe { negcurv_problem_lookup(c("other-thread").as_ptr(), &mut p) };
        assert!(last_error().contains("other-thread"));
    })
    .join()
    .unwrap();
    assert!(last_error().contains("first-missing"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(negcurv_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

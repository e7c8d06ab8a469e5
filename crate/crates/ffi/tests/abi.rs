use std::ffi::{CStr, CString};
use std::ptr;

use pkgamma_ffi::*;

fn eval(f: impl FnOnce(*mut PkEval) -> PkStatus) -> (PkStatus, PkEval) {
    let mut out = PkEval {
        value: f64::NAN,
        abs_err: f64::NAN,
    };
    let status = f(&mut out);
    (status, out)
}

fn last_error() -> Option<String> {
    let p = pk_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn point_functions() {
    let (s, g) = eval(|o| unsafe { pk_gamma(1.0, 1.0, 5.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert_eq!(g.value, 24.0);
    assert!(last_error().is_none());

    let (s, g) = eval(|o| unsafe { pk_gamma(2.0, 3.0, 3.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!((g.value - 2.0 / 3.0).abs() < 1e-15);

    let (s, b) = eval(|o| unsafe { pk_beta(1.0, 2.0, 2.0, 2.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!((b.value - 0.5).abs() < 1e-15);

    let (s, d) = eval(|o| unsafe { pk_psi(1.0, 1.0, 1.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!((d.value + 0.577_215_664_901_532_9).abs() < 1e-15);

    // ψ'(1) = π²/6
    let (s, t) = eval(|o| unsafe { pk_polygamma(1.0, 1.0, 1.0, 2, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!((t.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);

    let (s, q) = eval(|o| unsafe { pk_poch(2.0, 1.0, 1.0, 3, o) });
    assert_eq!(s, PkStatus::Ok);
    assert_eq!(q.value, 48.0);
}

#[test]
fn errors_set_status_and_message() {
    let (s, _) = eval(|o| unsafe { pk_gamma(1.0, 1.0, -2.0, o) });
    assert_eq!(s, PkStatus::Pole);
    assert_eq!(last_error().as_deref(), Some("pole at index 2"));
    let name = unsafe { CStr::from_ptr(pk_status_name(s)) };
    assert_eq!(name.to_str().unwrap(), "pole");

    let (s, _) = eval(|o| unsafe { pk_gamma(-1.0, 1.0, 2.0, o) });
    assert_eq!(s, PkStatus::InvalidParams);

    let (s, _) = eval(|o| unsafe { pk_beta(1.0, 1.0, -1.0, 1.0, o) });
    assert_eq!(s, PkStatus::Domain);

    let (s, _) = eval(|o| unsafe { pk_polygamma(1.0, 1.0, 1.0, 0, o) });
    assert_eq!(s, PkStatus::InvalidParams);

    assert_eq!(
        unsafe { pk_gamma(1.0, 1.0, 2.0, ptr::null_mut()) },
        PkStatus::NullPointer
    );
    assert!(last_error().unwrap().contains("null"));

    // A successful call clears the message.
    let (s, _) = eval(|o| unsafe { pk_gamma(1.0, 1.0, 2.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!(last_error().is_none());
}

#[test]
fn log_gamma_survives_overflow() {
    let (mut ln, mut sign) = (0.0, 0.0);
    assert_eq!(
        unsafe { pk_ln_gamma(1.0, 1.0, 500.0, &mut ln, &mut sign) },
        PkStatus::Ok
    );
    assert!((ln - 2_605.115_850_361_734).abs() < 1e-10);
    assert_eq!(sign, 1.0);
    assert_eq!(
        unsafe { pk_ln_gamma(1.0, 1.0, -0.5, &mut ln, &mut sign) },
        PkStatus::Ok
    );
    assert_eq!(sign, -1.0);
    assert_eq!(
        unsafe { pk_ln_gamma(1.0, 1.0, 2.0, &mut ln, ptr::null_mut()) },
        PkStatus::NullPointer
    );
}

#[test]
fn hyper_handle_lifecycle() {
    // 1F1(1; 2; x) = (e^x - 1)/x with unit scales.
    let upper = [1.0, 1.0, 1.0];
    let lower = [2.0, 1.0, 1.0];
    let mut h = ptr::null_mut();
    let s = unsafe { pk_hyper_new(upper.as_ptr(), 1, lower.as_ptr(), 1, &mut h) };
    assert_eq!(s, PkStatus::Ok);
    assert!(!h.is_null());
    let (s, v) = eval(|o| unsafe { pk_hyper_eval(h, 1.0, o) });
    assert_eq!(s, PkStatus::Ok);
    assert!((v.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    unsafe { pk_hyper_free(h) };
    unsafe { pk_hyper_free(ptr::null_mut()) };

    // Binomial shape outside its radius.
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { pk_hyper_new(upper.as_ptr(), 1, ptr::null(), 0, &mut h) },
        PkStatus::Ok
    );
    let (s, _) = eval(|o| unsafe { pk_hyper_eval(h, 2.0, o) });
    assert_eq!(s, PkStatus::Divergent);
    unsafe { pk_hyper_free(h) };

    let bad_lower = [-1.0, 1.0, 1.0];
    let mut h = ptr::null_mut();
    let s = unsafe { pk_hyper_new(upper.as_ptr(), 1, bad_lower.as_ptr(), 1, &mut h) };
    assert_eq!(s, PkStatus::LowerPole);
    assert!(h.is_null());

    assert_eq!(
        unsafe { pk_hyper_new(ptr::null(), 2, ptr::null(), 0, &mut h) },
        PkStatus::NullPointer
    );
    let (s, _) = eval(|o| unsafe { pk_hyper_eval(ptr::null(), 0.5, o) });
    assert_eq!(s, PkStatus::NullPointer);
}

#[test]
fn audit_handle_lifecycle() {
    let suite = CString::new("beta").unwrap();
    let grid = CString::new("p=1,2;k=1,2;x=0.7,2.5").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { pk_audit_run(suite.as_ptr(), grid.as_ptr(), 0.0, &mut a) },
        PkStatus::Ok
    );
    assert!(unsafe { pk_audit_all_pass(a) });
    let json = unsafe { CStr::from_ptr(pk_audit_report_json(a)) }
        .to_str()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["suite"], "beta");
    assert!(!v["records"].as_array().unwrap().is_empty());
    unsafe { pk_audit_free(a) };

    let empty = CString::new("").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { pk_audit_run(suite.as_ptr(), empty.as_ptr(), 0.0, &mut a) },
        PkStatus::InvalidParams
    );
    assert!(a.is_null());
    let unknown = CString::new("zeta").unwrap();
    assert_eq!(
        unsafe { pk_audit_run(unknown.as_ptr(), grid.as_ptr(), 0.0, &mut a) },
        PkStatus::InvalidParams
    );
    let bad_utf8 = [0xffu8 as std::ffi::c_char, 0];
    assert_eq!(
        unsafe { pk_audit_run(bad_utf8.as_ptr(), grid.as_ptr(), 0.0, &mut a) },
        PkStatus::InvalidUtf8
    );
    assert!(!unsafe { pk_audit_all_pass(ptr::null()) });
    assert!(unsafe { pk_audit_report_json(ptr::null()) }.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/pkgamma.h");
    for name in [
        "pk_last_error",
        "pk_status_name",
        "pk_gamma",
        "pk_ln_gamma",
        "pk_beta",
        "pk_psi",
        "pk_polygamma",
        "pk_poch",
        "pk_hyper_new",
        "pk_hyper_eval",
        "pk_hyper_free",
        "pk_audit_run",
        "pk_audit_all_pass",
        "pk_audit_report_json",
        "pk_audit_free",
        "typedef struct PkHyper PkHyper;",
        "typedef struct PkAudit PkAudit;",
        "PK_STATUS_POLE = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

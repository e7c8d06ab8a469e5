//! C ABI over `pkgamma`.
//!
//! Every entry point returns a [`PkStatus`]; on failure a description is
//! available from [`pk_last_error`] on the same thread. Panics never cross
//! the boundary. Handles are opaque and must be released with their
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pkgamma::audit::{run_audit, AuditGrid, AuditReport, Suite, Tolerances};
use pkgamma::beta::{beta_closed, BetaArgs};
use pkgamma::cli::report_json;
use pkgamma::gamma::{gamma_closed, gamma_value};
use pkgamma::hyper::{hyper_series, HyperParams, LowerParam, SeriesControl, UpperParam};
use pkgamma::kernel::PkParams;
use pkgamma::pochhammer::{poch_direct, PochSpec};
use pkgamma::psi::{polygamma, psi};
use pkgamma::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Pole = 3,
    Domain = 4,
    NoConvergence = 5,
    Divergent = 6,
    MaxTermsExceeded = 7,
    LowerPole = 8,
    UnsupportedShape = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

/// A value with an absolute error estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PkEval {
    pub value: f64,
    pub abs_err: f64,
}

/// A validated set of hypergeometric parameters.
pub struct PkHyper {
    params: HyperParams,
}

/// A finished audit together with its serialized report.
pub struct PkAudit {
    report: AuditReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(PkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Pole { .. } => PkStatus::Pole,
            Error::Domain(_) | Error::Index { .. } => PkStatus::Domain,
            Error::InvalidParams(_) => PkStatus::InvalidParams,
            Error::NoConvergence { .. } => PkStatus::NoConvergence,
            Error::Divergent(_) => PkStatus::Divergent,
            Error::MaxTermsExceeded { .. } => PkStatus::MaxTermsExceeded,
            Error::LowerPole { .. } => PkStatus::LowerPole,
            Error::UnsupportedShape(_) => PkStatus::UnsupportedShape,
        };
        Fail(status, e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(PkStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PkStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PkStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PkStatus::Panic
        }
    }
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    // SAFETY: non-null and, by the caller's contract, writable.
    unsafe { out.write(value) };
    Ok(())
}

/// # Safety
/// `s` must be null or a nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(name));
    }
    // SAFETY: non-null and nul-terminated by the caller's contract.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Fail(PkStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// # Safety
/// `ptr` must be null only when `len` is zero, else valid for `3*len` reads.
unsafe fn read_triples(ptr: *const f64, len: usize, name: &str) -> Result<Vec<[f64; 3]>, Fail> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    let n = len
        .checked_mul(3)
        .ok_or_else(|| Fail(PkStatus::InvalidParams, format!("{name} length overflows")))?;
    // SAFETY: the caller guarantees `3*len` readable doubles.
    let flat = unsafe { std::slice::from_raw_parts(ptr, n) };
    Ok(flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
}

fn eval_of(value: f64, abs_err: f64) -> PkEval {
    PkEval { value, abs_err }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn pk_status_name(status: PkStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PkStatus::Ok => c"ok",
        PkStatus::NullPointer => c"null_pointer",
        PkStatus::InvalidParams => c"invalid_params",
        PkStatus::Pole => c"pole",
        PkStatus::Domain => c"domain",
        PkStatus::NoConvergence => c"no_convergence",
        PkStatus::Divergent => c"divergent",
        PkStatus::MaxTermsExceeded => c"max_terms_exceeded",
        PkStatus::LowerPole => c"lower_pole",
        PkStatus::UnsupportedShape => c"unsupported_shape",
        PkStatus::InvalidUtf8 => c"invalid_utf8",
        PkStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// `pΓk(x)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_gamma(p: f64, k: f64, x: f64, out: *mut PkEval) -> PkStatus {
    guard(|| {
        let r = gamma_value(PkParams::new(p, k)?, x)?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(r.value, r.abs_err), "out") }
    })
}

/// `ln|pΓk(x)|` and the sign of `pΓk(x)`; usable where the value overflows.
///
/// # Safety
/// `ln_abs` and `sign` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_ln_gamma(
    p: f64,
    k: f64,
    x: f64,
    ln_abs: *mut f64,
    sign: *mut f64,
) -> PkStatus {
    guard(|| {
        if sign.is_null() {
            return Err(null("sign"));
        }
        let g = gamma_closed(PkParams::new(p, k)?, x)?;
        // SAFETY: forwarded caller contract.
        unsafe {
            write_out(ln_abs, g.ln_value, "ln_abs")?;
            write_out(sign, g.sign, "sign")
        }
    })
}

/// `pBk(x, y)` for positive `x`, `y`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_beta(p: f64, k: f64, x: f64, y: f64, out: *mut PkEval) -> PkStatus {
    guard(|| {
        let r = beta_closed(&BetaArgs::new(x, y, PkParams::new(p, k)?)?)?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(r.value, r.abs_err), "out") }
    })
}

/// `pψk(x)`, the logarithmic derivative of `pΓk`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_psi(p: f64, k: f64, x: f64, out: *mut PkEval) -> PkStatus {
    guard(|| {
        let r = psi(PkParams::new(p, k)?, x)?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(r.value, r.abs_err), "out") }
    })
}

/// The `r`-th derivative of `ln pΓk` (`r >= 1`; `r = 1` is [`pk_psi`]).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_polygamma(
    p: f64,
    k: f64,
    x: f64,
    r: u32,
    out: *mut PkEval,
) -> PkStatus {
    guard(|| {
        let params = PkParams::new(p, k)?;
        let v = match r {
            0 => {
                return Err(Fail(
                    PkStatus::InvalidParams,
                    "order must be at least 1".into(),
                ))
            }
            1 => psi(params, x)?,
            _ => polygamma(params, x, r)?,
        };
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(v.value, v.abs_err), "out") }
    })
}

/// The Pochhammer symbol `p(x)_{n,k}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_poch(p: f64, k: f64, x: f64, n: u32, out: *mut PkEval) -> PkStatus {
    guard(|| {
        let spec = PochSpec::new(x, n, PkParams::new(p, k)?)?;
        let v = poch_direct(&spec);
        let err = 2.0 * f64::from(n.max(1)) * f64::EPSILON * v.abs();
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(v, err), "out") }
    })
}

/// Builds hypergeometric parameters from `r` upper triples `(a, p, k)` and
/// `q` lower triples `(b, t, s)`, flattened.
///
/// # Safety
/// `upper` and `lower` must hold `3*r` and `3*q` doubles (either may be
/// null when its count is zero); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_hyper_new(
    upper: *const f64,
    r: usize,
    lower: *const f64,
    q: usize,
    out: *mut *mut PkHyper,
) -> PkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let (up, lo) = unsafe {
            (
                read_triples(upper, r, "upper")?,
                read_triples(lower, q, "lower")?,
            )
        };
        let params = HyperParams::new(
            up.into_iter()
                .map(|[a, p, k]| UpperParam::new(a, p, k))
                .collect(),
            lo.into_iter()
                .map(|[b, t, s]| LowerParam::new(b, t, s))
                .collect(),
        )?;
        let handle = Box::into_raw(Box::new(PkHyper { params }));
        // SAFETY: `out` checked non-null above.
        unsafe { out.write(handle) };
        Ok(())
    })
}

/// Sums the series at `x`.
///
/// # Safety
/// `hyper` must come from [`pk_hyper_new`] and not be freed; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_hyper_eval(
    hyper: *const PkHyper,
    x: f64,
    out: *mut PkEval,
) -> PkStatus {
    guard(|| {
        // SAFETY: a live handle by the caller's contract.
        let h = unsafe { hyper.as_ref() }.ok_or_else(|| null("hyper"))?;
        let r = hyper_series(&h.params, x, SeriesControl::default())?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, eval_of(r.value, r.abs_err), "out") }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `hyper` must be null or come from [`pk_hyper_new`], and is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn pk_hyper_free(hyper: *mut PkHyper) {
    if !hyper.is_null() {
        // SAFETY: ownership returns from `Box::into_raw` in `pk_hyper_new`.
        drop(unsafe { Box::from_raw(hyper) });
    }
}

/// Runs an audit. `suite` is one of `pochhammer gamma beta psi hyper all`;
/// `grid` is `default` or `p=..;k=..;x=..;n=..;m=..`; `tol <= 0` selects
/// the built-in tolerance table.
///
/// # Safety
/// `suite` and `grid` must be nul-terminated strings; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn pk_audit_run(
    suite: *const c_char,
    grid: *const c_char,
    tol: f64,
    out: *mut *mut PkAudit,
) -> PkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let (suite, grid) = unsafe { (read_str(suite, "suite")?, read_str(grid, "grid")?) };
        let suite: Suite = suite.parse()?;
        let grid = AuditGrid::parse(grid)?;
        let tolerances = if tol > 0.0 {
            Tolerances::uniform(tol)?
        } else {
            Tolerances::default()
        };
        let report = run_audit(suite, &grid, &tolerances)?;
        let json = CString::new(report_json(&report)).expect("JSON has no nul bytes");
        let handle = Box::into_raw(Box::new(PkAudit { report, json }));
        // SAFETY: `out` checked non-null above.
        unsafe { out.write(handle) };
        Ok(())
    })
}

/// Whether every evaluated corrected form passed; false for null.
///
/// # Safety
/// `audit` must be null or a live handle from [`pk_audit_run`].
#[no_mangle]
pub unsafe extern "C" fn pk_audit_all_pass(audit: *const PkAudit) -> bool {
    // SAFETY: a live handle or null by the caller's contract.
    unsafe { audit.as_ref() }.is_some_and(|a| a.report.summary.all_corrected_pass)
}

/// The JSON report, owned by the handle; null for a null handle.
///
/// # Safety
/// `audit` must be null or a live handle from [`pk_audit_run`].
#[no_mangle]
pub unsafe extern "C" fn pk_audit_report_json(audit: *const PkAudit) -> *const c_char {
    // SAFETY: a live handle or null by the caller's contract.
    unsafe { audit.as_ref() }.map_or(ptr::null(), |a| a.json.as_ptr())
}

/// Releases an audit handle; null is ignored.
///
/// # Safety
/// `audit` must be null or come from [`pk_audit_run`], and is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn pk_audit_free(audit: *mut PkAudit) {
    if !audit.is_null() {
        // SAFETY: ownership returns from `Box::into_raw` in `pk_audit_run`.
        drop(unsafe { Box::from_raw(audit) });
    }
}

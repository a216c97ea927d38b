//! C ABI for `glscov`.
//!
//! Every entry point returns a [`GlsStatus`]; results go through out
//! pointers. On failure the message is available from
//! [`gls_last_error_message`] on the same thread. Generating functions are
//! opaque [`GlsPsi`] handles released with [`gls_psi_free`]; strings
//! returned by the library are released with [`gls_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use glscov::cov_bounds::{self, BoundReport};
use glscov::finite_oracle::{self, CampaignConfig, FiniteProbSpace, SigmaField};
use glscov::fundamental;
use glscov::psi::{self, PsiFunction};
use glscov::{tails, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlsStatus {
    Ok = 0,
    Domain = 1,
    Unsupported = 2,
    EmptySupport = 3,
    TrivialNatural = 4,
    MomentMonotonicity = 5,
    Invalid = 6,
    EnumerationTooLarge = 7,
    Parse = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

/// A covariance bound: `value` is `+inf` when `feasible` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlsBound {
    pub value: f64,
    pub feasible: i32,
}

/// Opaque generating function.
pub struct GlsPsi {
    inner: PsiFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GlsStatus {
    match e {
        Error::Domain(_) => GlsStatus::Domain,
        Error::Unsupported(_) => GlsStatus::Unsupported,
        Error::EmptySupport => GlsStatus::EmptySupport,
        Error::TrivialNatural => GlsStatus::TrivialNatural,
        Error::MomentMonotonicity { .. } => GlsStatus::MomentMonotonicity,
        Error::Invalid(_) => GlsStatus::Invalid,
        Error::EnumerationTooLarge(_) => GlsStatus::EnumerationTooLarge,
        Error::Parse(_) => GlsStatus::Parse,
        Error::Io(_) => GlsStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlsStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            GlsStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GlsStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn psi_ref<'a>(p: *const GlsPsi, what: &'static str) -> Result<&'a PsiFunction, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or(Fail::Null(what))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail::Lib(Error::Parse(format!("{what}: {e}"))))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON output contains no nul bytes").into_raw()
}

fn bound_out(r: BoundReport) -> GlsBound {
    GlsBound { value: r.value, feasible: r.feasible as i32 }
}

/// The message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a generating function from JSON, e.g. `{"kind":"power","m":2}`.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_from_json(json: *const c_char, out: *mut *mut GlsPsi) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let psi = PsiFunction::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(GlsPsi { inner: psi }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_free(psi: *mut GlsPsi) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

/// The canonical JSON form of a handle; free with [`gls_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gls_psi_to_json(psi: *const GlsPsi, out: *mut *mut c_char) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = c_string(psi_ref(psi, "psi")?.to_json());
        Ok(())
    })
}

/// `psi(p)`; `+inf` outside the support.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_eval(psi: *const GlsPsi, p: f64, out: *mut f64) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = psi::eval_psi(psi_ref(psi, "psi")?, p)?;
        Ok(())
    })
}

/// The dual `psi(p/(p-1))` as a new handle.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_dual(psi: *const GlsPsi, out: *mut *mut GlsPsi) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let d = psi::dual_psi(psi_ref(psi, "psi")?)?;
        *out = Box::into_raw(Box::new(GlsPsi { inner: d }));
        Ok(())
    })
}

/// `phi[G psi](delta)`, with the sup restricted to `p >= trunc_low` when
/// `trunc_low` is not NaN. `argmax_p` may be null.
#[no_mangle]
pub unsafe extern "C" fn gls_fundamental(
    psi: *const GlsPsi,
    delta: f64,
    trunc_low: f64,
    value: *mut f64,
    argmax_p: *mut f64,
) -> GlsStatus {
    guard(|| {
        let value = out_ref(value, "value")?;
        let psi = psi_ref(psi, "psi")?;
        let r = if trunc_low.is_nan() {
            fundamental::fundamental(psi, delta)?
        } else {
            fundamental::fundamental_truncated(psi, trunc_low, delta)?
        };
        *value = r.value;
        if let Some(a) = argmax_p.as_mut() {
            *a = r.argmax_p;
        }
        Ok(())
    })
}

/// Upper bound on `P(|xi| > y)` for `||xi|| = norm`, valid for `y >= e norm`.
#[no_mangle]
pub unsafe extern "C" fn gls_tail_bound(psi: *const GlsPsi, norm: f64, y: f64, out: *mut f64) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = tails::tail_bound(psi_ref(psi, "psi")?, norm, y)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gls_davydov_bound(
    alpha: f64,
    p: f64,
    q: f64,
    norm_p: f64,
    norm_q: f64,
    out: *mut GlsBound,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bound_out(cov_bounds::davydov_bound(alpha, p, q, norm_p, norm_q)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gls_ibragimov_bound(
    beta: f64,
    p: f64,
    norm_p: f64,
    norm_q: f64,
    out: *mut GlsBound,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bound_out(cov_bounds::ibragimov_bound(beta, p, norm_p, norm_q)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gls_strong_bound(
    psi: *const GlsPsi,
    nu: *const GlsPsi,
    beta: f64,
    norm_xi: f64,
    norm_eta: f64,
    out: *mut GlsBound,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = cov_bounds::gls_strong_bound(psi_ref(psi, "psi")?, psi_ref(nu, "nu")?, beta, norm_xi, norm_eta)?;
        *out = bound_out(r);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gls_uniform_bound(
    psi: *const GlsPsi,
    nu: *const GlsPsi,
    alpha: f64,
    norm_xi: f64,
    norm_eta: f64,
    out: *mut GlsBound,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = cov_bounds::gls_uniform_bound(psi_ref(psi, "psi")?, psi_ref(nu, "nu")?, alpha, norm_xi, norm_eta)?;
        *out = bound_out(r);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gls_identical_bound(
    psi: *const GlsPsi,
    alpha: f64,
    norm_xi: f64,
    norm_eta: f64,
    out: *mut GlsBound,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bound_out(cov_bounds::gls_identical_bound(psi_ref(psi, "psi")?, alpha, norm_xi, norm_eta)?);
        Ok(())
    })
}

/// Exact `alpha` and `beta` of two partitions of a finite space. `f_blocks`
/// and `g_blocks` give each atom's block id (contiguous from 0).
#[no_mangle]
pub unsafe extern "C" fn gls_mixing_coefficients(
    probs: *const f64,
    atoms: usize,
    f_blocks: *const usize,
    g_blocks: *const usize,
    alpha: *mut f64,
    beta: *mut f64,
) -> GlsStatus {
    guard(|| {
        let alpha = out_ref(alpha, "alpha")?;
        let beta = out_ref(beta, "beta")?;
        let space = FiniteProbSpace::new(slice_arg(probs, atoms, "probs")?.to_vec())?;
        let f = SigmaField::new(slice_arg(f_blocks, atoms, "f_blocks")?.to_vec())?;
        let g = SigmaField::new(slice_arg(g_blocks, atoms, "g_blocks")?.to_vec())?;
        let (a, b) = finite_oracle::mixing_coefficients(&space, &f, &g)?;
        *alpha = a;
        *beta = b;
        Ok(())
    })
}

/// Runs the verification campaign with the default families and exponent
/// grid; writes the JSON report. Free with [`gls_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gls_verify_campaign_json(
    instances: usize,
    seed: u64,
    max_atoms: usize,
    max_blocks: usize,
    out_json: *mut *mut c_char,
) -> GlsStatus {
    guard(|| {
        let out = out_ref(out_json, "out_json")?;
        *out = ptr::null_mut();
        let config = CampaignConfig { instances, seed, max_atoms, max_blocks, ..CampaignConfig::default() };
        let report = finite_oracle::verify_campaign(&config)?;
        *out = c_string(serde_json::to_string(&report).map_err(Error::from)?);
        Ok(())
    })
}

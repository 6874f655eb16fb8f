//! C ABI over `ffc-core`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every entry point returns an [`FfcStatus`]; on failure a message is kept
//! per thread and can be read with [`ffc_last_error`]. Strings handed out by
//! the library are released with [`ffc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ffc_core::convolution::{asym_convolve, m_fold_asym, m_fold_sym, sym_convolve};
use ffc_core::graph::{self, MatchingUnion, Mode, RamanujanCertificate, Verdict};
use ffc_core::rng::StreamRng;
use ffc_core::{io, search, sturm, transforms, Error, RatPoly};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfcStatus {
    Ok = 0,
    /// Argument out of range or inconsistent.
    Parameter = 1,
    /// A resource budget would be exceeded.
    Budget = 2,
    /// Input outside an operation's contract.
    Contract = 3,
    /// Evaluation at a pole.
    Pole = 4,
    /// Malformed JSON or number.
    Parse = 5,
    Internal = 6,
    Io = 7,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 8,
    /// A Rust panic was caught at the boundary.
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfcMode {
    Bipartite = 0,
    Plain = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfcKind {
    Sym = 0,
    Asym = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfcVerdict {
    StrictlyRamanujan = 0,
    RamanujanWithBoundary = 1,
    NotRamanujan = 2,
}

/// Polynomial with exact rational coefficients.
pub struct FfcPoly(RatPoly);
/// Union of perfect matchings.
pub struct FfcGraph(MatchingUnion);
/// Exact Ramanujan certificate, including its graph.
pub struct FfcCertificate(RamanujanCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FfcStatus {
    match e {
        Error::Parameter(_) => FfcStatus::Parameter,
        Error::Budget(_) => FfcStatus::Budget,
        Error::Contract(_) => FfcStatus::Contract,
        Error::Pole(_) => FfcStatus::Pole,
        Error::Parse(_) | Error::Json(_) => FfcStatus::Parse,
        Error::Internal(_) => FfcStatus::Internal,
        Error::Io(_) => FfcStatus::Io,
    }
}

enum Fail {
    Core(Error),
    Arg(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> FfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfcStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg.to_string());
            FfcStatus::InvalidArgument
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FfcStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Arg(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Arg(what))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Arg(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Arg("string argument is not UTF-8"))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON output has no nul bytes").into_raw()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn mode_of(m: FfcMode) -> Mode {
    match m {
        FfcMode::Bipartite => Mode::Bipartite,
        FfcMode::Plain => Mode::Nonbipartite,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ffc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ffc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ffc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"coeffs": ["1", "-3/2", ...]}` (constant term first).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_poly_from_json(json: *const c_char, out: *mut *mut FfcPoly) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        let p = io::poly_from_json(str_arg(json, "json is null")?)?;
        *out = boxed(FfcPoly(p));
        Ok(())
    })
}

/// Builds a polynomial from `len` integer coefficients, constant term first.
///
/// # Safety
/// `coeffs` must point to `len` values (may be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn ffc_poly_from_i64(coeffs: *const i64, len: usize, out: *mut *mut FfcPoly) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        let c: &[i64] = if len == 0 {
            &[]
        } else if coeffs.is_null() {
            return Err(Fail::Arg("coeffs is null"));
        } else {
            std::slice::from_raw_parts(coeffs, len)
        };
        *out = boxed(FfcPoly(RatPoly::from_i64(c)));
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable. Free the result with
/// [`ffc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ffc_poly_to_json(p: *const FfcPoly, out: *mut *mut c_char) -> FfcStatus {
    guard(|| {
        let p = borrow(p, "poly is null")?;
        *out_ptr(out, "out is null")? = give_string(io::poly_to_json(&p.0));
        Ok(())
    })
}

/// Degree, or -1 for the zero polynomial.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffc_poly_degree(p: *const FfcPoly, out: *mut i64) -> FfcStatus {
    guard(|| {
        let p = borrow(p, "poly is null")?;
        *out_ptr(out, "out is null")? = p.0.degree().map_or(-1, |d| d as i64);
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffc_poly_free(p: *mut FfcPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `p ⊞_d q` or `p ⊞⊞_d q` depending on `kind`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_convolve(
    kind: FfcKind,
    p: *const FfcPoly,
    q: *const FfcPoly,
    d: usize,
    out: *mut *mut FfcPoly,
) -> FfcStatus {
    guard(|| {
        let (p, q) = (borrow(p, "p is null")?, borrow(q, "q is null")?);
        let out = out_ptr(out, "out is null")?;
        let r = match kind {
            FfcKind::Sym => sym_convolve(&p.0, &q.0, d)?,
            FfcKind::Asym => asym_convolve(&p.0, &q.0, d)?,
        };
        *out = boxed(FfcPoly(r));
        Ok(())
    })
}

/// `p` convolved with itself `m` times.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_m_fold(
    kind: FfcKind,
    p: *const FfcPoly,
    m: usize,
    d: usize,
    out: *mut *mut FfcPoly,
) -> FfcStatus {
    guard(|| {
        let p = borrow(p, "p is null")?;
        let out = out_ptr(out, "out is null")?;
        let r = match kind {
            FfcKind::Sym => m_fold_sym(&p.0, m, d)?,
            FfcKind::Asym => m_fold_asym(&p.0, m, d)?,
        };
        *out = boxed(FfcPoly(r));
        Ok(())
    })
}

/// Exact real-rootedness via Sturm sequences.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_is_real_rooted(p: *const FfcPoly, out: *mut bool) -> FfcStatus {
    guard(|| {
        let p = borrow(p, "poly is null")?;
        *out_ptr(out, "out is null")? = sturm::is_real_rooted(&p.0)?;
        Ok(())
    })
}

/// `2 sqrt(m-1)` as an exact string such as `"2*sqrt(2)"` plus a double.
/// Either output pointer may be null.
///
/// # Safety
/// Non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_ramanujan_bound(m: usize, exact: *mut *mut c_char, approx: *mut f64) -> FfcStatus {
    guard(|| {
        let b = transforms::ramanujan_bound(m)?;
        if let Some(e) = exact.as_mut() {
            *e = give_string(b.to_string());
        }
        if let Some(a) = approx.as_mut() {
            *a = b.to_f64();
        }
        Ok(())
    })
}

/// Samples `m` random perfect matchings on `d` vertices per side
/// (bipartite) or `d` vertices in total (plain).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_sample(
    mode: FfcMode,
    d: usize,
    m: usize,
    seed: u64,
    out: *mut *mut FfcGraph,
) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        let mut g = graph::sample(mode_of(mode), d, m, &mut StreamRng::new(seed))?;
        g.seed = Some(seed);
        *out = boxed(FfcGraph(g));
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_from_json(json: *const c_char, out: *mut *mut FfcGraph) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        *out = boxed(FfcGraph(io::graph_from_json(str_arg(json, "json is null")?)?));
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_to_json(g: *const FfcGraph, out: *mut *mut c_char) -> FfcStatus {
    guard(|| {
        let g = borrow(g, "graph is null")?;
        *out_ptr(out, "out is null")? = give_string(io::graph_to_json(&g.0));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffc_graph_free(g: *mut FfcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Exact certification of `g`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_certify(g: *const FfcGraph, out: *mut *mut FfcCertificate) -> FfcStatus {
    guard(|| {
        let g = borrow(g, "graph is null")?;
        let out = out_ptr(out, "out is null")?;
        *out = boxed(FfcCertificate(graph::certify(&g.0)?));
        Ok(())
    })
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_certificate_verdict(c: *const FfcCertificate, out: *mut FfcVerdict) -> FfcStatus {
    guard(|| {
        let c = borrow(c, "certificate is null")?;
        *out_ptr(out, "out is null")? = match c.0.verdict {
            Verdict::StrictlyRamanujan => FfcVerdict::StrictlyRamanujan,
            Verdict::RamanujanWithBoundary => FfcVerdict::RamanujanWithBoundary,
            Verdict::NotRamanujan => FfcVerdict::NotRamanujan,
        };
        Ok(())
    })
}

/// Recomputes the certificate from its embedded graph and compares.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_certificate_reverify(c: *const FfcCertificate, out: *mut bool) -> FfcStatus {
    guard(|| {
        let c = borrow(c, "certificate is null")?;
        *out_ptr(out, "out is null")? = c.0.reverify()?;
        Ok(())
    })
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_certificate_to_json(c: *const FfcCertificate, out: *mut *mut c_char) -> FfcStatus {
    guard(|| {
        let c = borrow(c, "certificate is null")?;
        *out_ptr(out, "out is null")? = give_string(io::certificate_to_json(&c.0));
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_certificate_from_json(json: *const c_char, out: *mut *mut FfcCertificate) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        *out = boxed(FfcCertificate(io::certificate_from_json(str_arg(json, "json is null")?)?));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffc_certificate_free(c: *mut FfcCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Rejection search. On success `*out` holds the certificate of the
/// lowest-indexed accepted trial and `*trial` its index; if no trial within
/// `max_trials` is accepted the call still returns `Ok` with `*out` null.
/// `trial` may be null.
///
/// # Safety
/// `out` must be writable; `trial` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ffc_search(
    mode: FfcMode,
    d: usize,
    m: usize,
    max_trials: u64,
    seed: u64,
    allow_boundary: bool,
    out: *mut *mut FfcCertificate,
    trial: *mut u64,
) -> FfcStatus {
    guard(|| {
        let out = out_ptr(out, "out is null")?;
        *out = ptr::null_mut();
        let r = search::rejection_search(mode_of(mode), d, m, max_trials, seed, allow_boundary)?;
        if let (Some(c), Some(i)) = (r.certificate, r.first_success_trial) {
            *out = boxed(FfcCertificate(c));
            if let Some(t) = trial.as_mut() {
                *t = i;
            }
        }
        Ok(())
    })
}

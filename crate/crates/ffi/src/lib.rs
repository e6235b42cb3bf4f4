//! C interface to algproof.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `*_free` function. Every call returns an [`AlgStatus`]; after a
//! failure, [`algproof_last_error`] describes it. Strings returned through out
//! parameters are owned by the caller and released with
//! [`algproof_string_free`].

use algproof::circuit::text::{parse, serialize};
use algproof::circuit::Circuit;
use algproof::frontend::files::{self, Doc};
use algproof::pit::{pit_equal, PitPolicy};
use algproof::proof_cps::ls::verify_ls;
use algproof::proof_cps::ps::verify_ps;
use algproof::proof_cps::{conic_check, gen_bvp_cps, verify_cps};
use algproof::proof_ips::{verify_ips, verify_ips_lin};
use algproof::ratfunc_cert::verify_qy;
use num_bigint::BigInt;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgStatus {
    Ok = 0,
    /// The input was well formed but the proof or identity does not hold.
    Rejected = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    InvalidArgument = 5,
    Internal = 6,
}

/// Identity-testing mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgPitMode {
    Exact = 0,
    Randomized = 1,
    Auto = 2,
}

/// An arithmetic circuit.
pub struct AlgCircuit {
    inner: Circuit,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: AlgStatus, msg: impl Into<String>) -> AlgStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> AlgStatus) -> AlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AlgStatus::Internal, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, AlgStatus> {
    if p.is_null() {
        return Err(fail(AlgStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AlgStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> AlgStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            AlgStatus::Ok
        }
        Err(_) => fail(AlgStatus::Internal, "output contains a NUL byte"),
    }
}

fn policy(mode: AlgPitMode, seed: u64) -> PitPolicy {
    match mode {
        AlgPitMode::Exact => PitPolicy::exact(),
        AlgPitMode::Randomized => PitPolicy::randomized(seed),
        AlgPitMode::Auto => PitPolicy::Auto { budget: algproof::pit::DEFAULT_TERM_BUDGET, seed },
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn algproof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn algproof_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a circuit in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn algproof_circuit_parse(text: *const c_char, out: *mut *mut AlgCircuit) -> AlgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AlgStatus::NullPointer, "null output pointer");
        }
        let t = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse(t) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(AlgCircuit { inner: c }));
                AlgStatus::Ok
            }
            Err(e) => fail(AlgStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `c` must be null or a handle from [`algproof_circuit_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn algproof_circuit_free(c: *mut AlgCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of gates.
///
/// # Safety
/// `c` must be a live circuit handle.
#[no_mangle]
pub unsafe extern "C" fn algproof_circuit_size(c: *const AlgCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.inner.size())
}

/// Writes the circuit back in the text format.
///
/// # Safety
/// `c` must be a live circuit handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn algproof_circuit_serialize(c: *const AlgCircuit, out: *mut *mut c_char) -> AlgStatus {
    guard(|| match (c.as_ref(), out.is_null()) {
        (Some(c), false) => put_string(out, serialize(&c.inner)),
        _ => fail(AlgStatus::NullPointer, "null argument"),
    })
}

/// Checks whether every negative constant and unprotected variable is
/// guarded by a squaring gate. Returns `Rejected` for non-conic circuits.
///
/// # Safety
/// `c` must be a live circuit handle; `protected_names` must point to
/// `count` NUL-terminated strings (or be null when `count` is 0).
#[no_mangle]
pub unsafe extern "C" fn algproof_conic_check(
    c: *const AlgCircuit,
    protected_names: *const *const c_char,
    count: usize,
) -> AlgStatus {
    guard(|| {
        let Some(c) = c.as_ref() else {
            return fail(AlgStatus::NullPointer, "null circuit");
        };
        if count > 0 && protected_names.is_null() {
            return fail(AlgStatus::NullPointer, "null name array");
        }
        let mut names = Vec::with_capacity(count);
        for i in 0..count {
            match str_arg(*protected_names.add(i)) {
                Ok(s) => names.push(s),
                Err(s) => return s,
            }
        }
        let v = conic_check(&c.inner, &names);
        if v.conic {
            AlgStatus::Ok
        } else {
            fail(AlgStatus::Rejected, v.to_string())
        }
    })
}

/// Tests whether two circuits compute the same polynomials. Returns `Ok` when
/// they agree and `Rejected` when they differ.
///
/// # Safety
/// `a` and `b` must be live circuit handles.
#[no_mangle]
pub unsafe extern "C" fn algproof_pit_equal(a: *const AlgCircuit, b: *const AlgCircuit, mode: AlgPitMode, seed: u64) -> AlgStatus {
    guard(|| {
        let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
            return fail(AlgStatus::NullPointer, "null circuit");
        };
        match pit_equal(&a.inner, &b.inner, &policy(mode, seed)) {
            Ok(v) if v.equal => AlgStatus::Ok,
            Ok(_) => fail(AlgStatus::Rejected, "circuits differ"),
            Err(e) => fail(AlgStatus::InvalidArgument, e.to_string()),
        }
    })
}

fn verify_doc(doc: &Doc, policy: &PitPolicy) -> Result<bool, String> {
    let e = |e: &dyn std::fmt::Display| e.to_string();
    match doc.kind.as_str() {
        "ips" => {
            let p = files::ips_from(doc).map_err(|x| e(&x))?;
            Ok(verify_ips(&p, policy).map_err(|x| e(&x))?.accepted())
        }
        "ipslin" => {
            let (s, c) = files::ipslin_from(doc).map_err(|x| e(&x))?;
            Ok(verify_ips_lin(&c, &s, policy).map_err(|x| e(&x))?.equal)
        }
        "qycert" => {
            let c = files::qycert_from(doc).map_err(|x| e(&x))?;
            Ok(verify_qy(&c).map_err(|x| e(&x))?.equal)
        }
        "cps" => {
            let p = files::cps_from(doc).map_err(|x| e(&x))?;
            Ok(verify_cps(&p, policy).map_err(|x| e(&x))?.equal)
        }
        "ps" => {
            let (s, r) = files::ps_from(doc).map_err(|x| e(&x))?;
            verify_ps(&r, &s).map_err(|x| e(&x))
        }
        "ls" => {
            let (s, d) = files::ls_from(doc).map_err(|x| e(&x))?;
            Ok(verify_ls(&d, &s).is_ok())
        }
        k => Err(format!("`{k}` files are not proofs")),
    }
}

/// Verifies a proof file (`ips`, `ipslin`, `qycert`, `cps`, `ps` or `ls`)
/// given as text. `include` lines are not resolved relative to any directory.
/// Returns `Ok` for a valid proof and `Rejected` otherwise.
///
/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn algproof_verify_text(text: *const c_char, mode: AlgPitMode, seed: u64) -> AlgStatus {
    guard(|| {
        let t = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let doc = match Doc::parse(t, None) {
            Ok(d) => d,
            Err(e) => return fail(AlgStatus::ParseError, e.to_string()),
        };
        match verify_doc(&doc, &policy(mode, seed)) {
            Ok(true) => AlgStatus::Ok,
            Ok(false) => fail(AlgStatus::Rejected, "proof rejected"),
            Err(m) => fail(AlgStatus::Rejected, m),
        }
    })
}

/// The linear-size CPS refutation of `sum 2^(i-1) x_i + M = 0`, as a `cps`
/// file. `m_decimal` is the decimal value of `M >= 1`.
///
/// # Safety
/// `m_decimal` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn algproof_gen_bvp_cps(n: usize, m_decimal: *const c_char, out: *mut *mut c_char) -> AlgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AlgStatus::NullPointer, "null output pointer");
        }
        let m = match str_arg(m_decimal) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let Ok(m) = m.trim().parse::<BigInt>() else {
            return fail(AlgStatus::InvalidArgument, "M is not an integer");
        };
        match gen_bvp_cps(n, &m) {
            Ok(p) => put_string(out, files::write_cps(&p)),
            Err(e) => fail(AlgStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn algproof_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

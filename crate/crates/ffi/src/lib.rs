//! C ABI for `entangled-control`.
//!
//! Objects are opaque handles created by `*_new` / `*_load` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`EcStatus`]; on failure [`ec_last_error`] describes what went wrong on
//! the calling thread. Strings returned through `char **` out-parameters are
//! owned by the caller and must be released with [`ec_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entangled_control::certify::{certify_separation, CertificateVerdict, CertifyOptions};
use entangled_control::exact::{fmt_fraction, parse_rational, to_f64, Q};
use entangled_control::ks::{validate_basis_set, verify_ks_property, KsBasisSet};
use entangled_control::report::to_json;
use entangled_control::witsenhausen::{
    evaluate_quantum, make_instance, search_deterministic, SearchOptions, SearchResult, WitsenhausenInstance,
};
use entangled_control::zero_error::{build_ks_channel, confusability_graph, independence_number};
use entangled_control::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    /// The computation ran but its check did not pass.
    CheckFailed = 1,
    InvalidArgument = 2,
    /// A search would exceed its budget.
    Inconclusive = 3,
    Io = 4,
    Parse = 5,
    NullPointer = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// A KS basis set.
pub struct EcKsSet(KsBasisSet);

/// A Witsenhausen instance at a fixed scale.
pub struct EcInstance(WitsenhausenInstance);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EcChannelInfo {
    pub inputs: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub alpha: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(EcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => EcStatus::Io,
            Error::Parse(_) | Error::Json(_) | Error::Csv(_) => EcStatus::Parse,
            _ => EcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<EcStatus, Failure>) -> EcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EcStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EcStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn read_rational(p: *const c_char, what: &str) -> Result<Q, Failure> {
    Ok(parse_rational(read_str(p, what)?)?)
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(EcStatus::Internal, "string contains NUL".into()))?;
    write_out(out, c.into_raw(), "string out-pointer")
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The bundled (6,4) set.
#[no_mangle]
pub extern "C" fn ec_ks_set_bundled() -> *mut EcKsSet {
    Box::into_raw(Box::new(EcKsSet(KsBasisSet::bundled())))
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_ks_set_load(path: *const c_char, out: *mut *mut EcKsSet) -> EcStatus {
    guard(|| {
        let set = KsBasisSet::load(read_str(path, "path")?)?;
        write_out(out, Box::into_raw(Box::new(EcKsSet(set))), "out")?;
        Ok(EcStatus::Ok)
    })
}

/// # Safety
/// `set` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ec_ks_set_free(set: *mut EcKsSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle; `q` and `d` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_ks_set_dims(set: *const EcKsSet, q: *mut usize, d: *mut usize) -> EcStatus {
    guard(|| {
        let set = deref(set, "set")?;
        write_out(q, set.0.q(), "q")?;
        write_out(d, set.0.d(), "d")?;
        Ok(EcStatus::Ok)
    })
}

/// `EC_STATUS_OK` when the set is orthonormal and has the KS property,
/// `EC_STATUS_CHECK_FAILED` otherwise.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ec_verify_ks(set: *const EcKsSet) -> EcStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        if let Some(bad) = validate_basis_set(set).first_failure() {
            return Err(Failure(
                EcStatus::CheckFailed,
                format!("basis {} is not orthonormal", bad.basis),
            ));
        }
        let ks = verify_ks_property(set);
        match ks.witness {
            None => Ok(EcStatus::Ok),
            Some(w) => Err(Failure(
                EcStatus::CheckFailed,
                format!("traversal {w:?} has no orthogonal pair"),
            )),
        }
    })
}

/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_channel_info(set: *const EcKsSet, out: *mut EcChannelInfo) -> EcStatus {
    guard(|| {
        let ch = build_ks_channel(&deref(set, "set")?.0)?;
        let g = confusability_graph(&ch);
        let degrees = (0..g.vertex_count()).map(|v| g.degree(v));
        let info = EcChannelInfo {
            inputs: g.vertex_count(),
            edges: g.edge_count(),
            min_degree: degrees.clone().min().unwrap_or(0),
            max_degree: degrees.max().unwrap_or(0),
            alpha: independence_number(&g).size,
        };
        write_out(out, info, "out")?;
        Ok(EcStatus::Ok)
    })
}

/// Instance at scale `t` with control weight `k` (e.g. `"1"`, `"7/2"`,
/// `"0.5"`) and uniform messages.
///
/// # Safety
/// `set` must be a live handle, `k` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_instance_new(
    set: *const EcKsSet,
    t: i64,
    k: *const c_char,
    out: *mut *mut EcInstance,
) -> EcStatus {
    guard(|| {
        let set = deref(set, "set")?.0.clone();
        let inst = make_instance(set, t, read_rational(k, "k")?, None)?;
        write_out(out, Box::into_raw(Box::new(EcInstance(inst))), "out")?;
        Ok(EcStatus::Ok)
    })
}

/// # Safety
/// `inst` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ec_instance_free(inst: *mut EcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Cost of the entangled strategy, as an exact fraction string and a double.
/// Either out-pointer may be NULL.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ec_quantum_cost(
    inst: *const EcInstance,
    exact: *mut *mut c_char,
    value: *mut f64,
) -> EcStatus {
    guard(|| {
        let cost = evaluate_quantum(&deref(inst, "inst")?.0)?.total.0;
        if !exact.is_null() {
            write_string(exact, fmt_fraction(&cost))?;
        }
        if !value.is_null() {
            value.write(to_f64(&cost));
        }
        Ok(EcStatus::Ok)
    })
}

/// Exhaustive search over `|c1| ≤ window`. `budget == 0` means unbounded and
/// `workers == 0` uses the default pool. Writes the result as JSON and
/// returns `EC_STATUS_INCONCLUSIVE` when the budget is exceeded.
///
/// # Safety
/// `inst` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_classical_search(
    inst: *const EcInstance,
    window: u32,
    budget: u64,
    workers: usize,
    json: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        let opts = SearchOptions {
            window,
            budget: (budget > 0).then_some(budget),
            workers: (workers > 0).then_some(workers),
        };
        let result = search_deterministic(&deref(inst, "inst")?.0, &opts)?;
        write_string(json, to_json(&result))?;
        Ok(match result {
            SearchResult::Complete(_) => EcStatus::Ok,
            SearchResult::Inconclusive { .. } => EcStatus::Inconclusive,
        })
    })
}

/// Separation certificate for cost bound `bound`. `t == 0` and `window < 0`
/// select the defaults. Writes the certificate as JSON; returns
/// `EC_STATUS_OK` when certified, `EC_STATUS_INCONCLUSIVE` when the budget
/// was exceeded and `EC_STATUS_CHECK_FAILED` otherwise.
///
/// # Safety
/// `set` must be a live handle, `k` and `bound` NUL-terminated strings and
/// `json` writable.
#[no_mangle]
pub unsafe extern "C" fn ec_certify(
    set: *const EcKsSet,
    k: *const c_char,
    bound: *const c_char,
    t: i64,
    window: i64,
    budget: u64,
    workers: usize,
    json: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        let window = match window {
            w if w < 0 => None,
            w => Some(u32::try_from(w).map_err(|_| Failure(EcStatus::InvalidArgument, "window too large".into()))?),
        };
        let opts = CertifyOptions {
            t: (t != 0).then_some(t),
            window,
            workers: (workers > 0).then_some(workers),
            budget: (budget > 0).then_some(budget),
            message_dist: None,
        };
        let cert = certify_separation(
            &deref(set, "set")?.0,
            read_rational(k, "k")?,
            read_rational(bound, "bound")?,
            &opts,
        )?;
        write_string(json, cert.to_json())?;
        Ok(match cert.verdict {
            CertificateVerdict::Certified => EcStatus::Ok,
            CertificateVerdict::Inconclusive => EcStatus::Inconclusive,
            CertificateVerdict::NotCertified | CertificateVerdict::Vacuous => EcStatus::CheckFailed,
        })
    })
}

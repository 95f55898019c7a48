//! C ABI over the core crate.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `_free` function. Strings returned through `char **` are
//! allocated here and must go back through `ts_string_free`. Every call
//! returns a `TsStatus`; on failure `ts_last_error_message` describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tessella::pathalg::io::{element_to_file, parse_qpot, qpot_to_file};
use tessella::pathalg::{check_d_squared, cyclic_derivative, ginzburg_dga, PathError, Potential, Quiver};
use tessella::repcount::{enumerate_reps, CountOptions, RepError};
use tessella::surfacemap::{dual_quiver, genus, validate_tiling, BraneTiling, MapError, TilingFile};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidTiling = 4,
    UnknownArrow = 5,
    Unsupported = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// A validated brane tiling.
pub struct TsTiling(BraneTiling);

/// A quiver together with a potential on it.
pub struct TsQpot {
    quiver: Quiver,
    potential: Potential,
}

/// Counts of `d`-dimensional representations over `F_q`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TsCounts {
    pub total: u64,
    /// Points where the trace of the potential is 0.
    pub zero: u64,
    /// Points where it is 1.
    pub one: u64,
    /// Points satisfying every Jacobi relation.
    pub crit: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(TsStatus, String);

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        let status = match e {
            PathError::Parse(_) => TsStatus::Parse,
            PathError::UnknownArrow(_) => TsStatus::UnknownArrow,
            PathError::LocalizedQuiverUnsupported | PathError::MixedInverse(_) => TsStatus::Unsupported,
            _ => TsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Path(p) => p.into(),
            other => Failure(TsStatus::InvalidTiling, other.to_string()),
        }
    }
}

impl From<RepError> for Failure {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Path(p) => p.into(),
            RepError::UnsupportedInverse(_) | RepError::Refused(_) => Failure(TsStatus::Unsupported, e.to_string()),
            other => Failure(TsStatus::InvalidArgument, other.to_string()),
        }
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TsStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(TsStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(TsStatus::InvalidArgument, e.to_string()))?;
    put(out, c.into_raw())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(|e| Failure(TsStatus::InvalidArgument, e.to_string()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a tiling file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_tiling_from_json(json: *const c_char, out: *mut *mut TsTiling) -> TsStatus {
    guard(|| {
        let file: TilingFile =
            serde_json::from_str(text(json, "json")?).map_err(|e| Failure(TsStatus::Parse, e.to_string()))?;
        let t = BraneTiling::from_file(&file)?;
        let report = validate_tiling(&t);
        if !report.valid {
            return Err(Failure(TsStatus::InvalidTiling, report.violations.join("; ")));
        }
        put(out, Box::into_raw(Box::new(TsTiling(t))))
    })
}

/// # Safety
/// `tiling` must come from `ts_tiling_from_json` and not be freed already; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ts_tiling_free(tiling: *mut TsTiling) {
    if !tiling.is_null() {
        drop(Box::from_raw(tiling));
    }
}

/// # Safety
/// `tiling` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_tiling_genus(tiling: *const TsTiling, out: *mut u32) -> TsStatus {
    guard(|| {
        let t = handle(tiling, "tiling")?;
        put(out, genus(&t.0.map)?)
    })
}

/// Dual quiver with potential of a tiling.
///
/// # Safety
/// `tiling` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_tiling_dual(tiling: *const TsTiling, out: *mut *mut TsQpot) -> TsStatus {
    guard(|| {
        let (quiver, potential) = dual_quiver(&handle(tiling, "tiling")?.0)?;
        put(out, Box::into_raw(Box::new(TsQpot { quiver, potential })))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_from_json(json: *const c_char, out: *mut *mut TsQpot) -> TsStatus {
    guard(|| {
        let (quiver, potential) = parse_qpot(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(TsQpot { quiver, potential })))
    })
}

/// # Safety
/// `qpot` must come from this library and not be freed already; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_free(qpot: *mut TsQpot) {
    if !qpot.is_null() {
        drop(Box::from_raw(qpot));
    }
}

/// Serializes in the same format `ts_qpot_from_json` reads.
///
/// # Safety
/// `qpot` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_to_json(qpot: *const TsQpot, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        let q = handle(qpot, "qpot")?;
        put_string(out, json(&qpot_to_file(&q.quiver, &q.potential))?)
    })
}

/// Cyclic derivative along the named arrow, as an element file (`{"terms": [...]}`).
///
/// # Safety
/// `qpot` must be a live handle, `arrow` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_derivative(
    qpot: *const TsQpot,
    arrow: *const c_char,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let q = handle(qpot, "qpot")?;
        let a = q.quiver.arrow_id(text(arrow, "arrow")?)?;
        let d = cyclic_derivative(&q.quiver, &q.potential, a)?;
        put_string(out, json(&element_to_file(&q.quiver, &d))?)
    })
}

/// Whether the Ginzburg differential squares to zero. Refuses localized quivers.
///
/// # Safety
/// `qpot` must be a live handle; `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_check_d_squared(qpot: *const TsQpot, holds: *mut bool) -> TsStatus {
    guard(|| {
        let q = handle(qpot, "qpot")?;
        let dga = ginzburg_dga(&q.quiver, &q.potential)?;
        put(holds, check_d_squared(&dga).holds)
    })
}

/// Exhaustive count of `d`-dimensional representations over the prime field `F_q`.
///
/// # Safety
/// `qpot` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_qpot_count(qpot: *const TsQpot, d: u32, q: u64, out: *mut TsCounts) -> TsStatus {
    guard(|| {
        let h = handle(qpot, "qpot")?;
        if d == 0 {
            return Err(Failure(TsStatus::InvalidArgument, "dimension must be at least 1".into()));
        }
        let r = enumerate_reps(&h.quiver, &h.potential, d as usize, q, &CountOptions::default())?;
        put(out, TsCounts { total: r.total, zero: r.zero, one: r.one, crit: r.crit })
    })
}

/// # Safety
/// `s` must come from this library and not be freed already; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

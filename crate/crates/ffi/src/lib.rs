//! C interface to `horace-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`HoraceStatus`]; on failure [`horace_last_error`] describes the cause.
//! Strings returned through `char **` are freed with [`horace_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use horace::field::PrimeField;
use horace::oracle;
use horace::picard::{self, PicClass};
use horace::planner::{plan_theorem2, verify_certificate, PlanConfig, ThresholdTable};
use horace::scheme::{CurveDescriptor, ZeroScheme};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoraceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Compute = 4,
    InvalidCertificate = 5,
    Panic = 6,
}

/// A class `(d; m_1, ..., m_r)` on the blown-up plane.
pub struct HoraceClass(PicClass);

/// A zero-dimensional scheme of point conditions.
pub struct HoraceScheme(ZeroScheme);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap());
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn horace_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guard(f: impl FnOnce() -> Result<(), (HoraceStatus, String)>) -> HoraceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HoraceStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HoraceStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (HoraceStatus, String)> {
    if p.is_null() {
        return Err((HoraceStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HoraceStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (HoraceStatus, String)> {
    if out.is_null() {
        return Err((HoraceStatus::NullPointer, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(|e| (HoraceStatus::Compute, e.to_string()))?.into_raw();
    Ok(())
}

fn parse_err(e: impl ToString) -> (HoraceStatus, String) {
    (HoraceStatus::Parse, e.to_string())
}

fn compute_err(e: impl ToString) -> (HoraceStatus, String) {
    (HoraceStatus::Compute, e.to_string())
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn horace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"d;m1,m2,..."`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_class_parse(text: *const c_char, out: *mut *mut HoraceClass) -> HoraceStatus {
    guard(|| {
        let text = read_str(text)?;
        if out.is_null() {
            return Err((HoraceStatus::NullPointer, "null output pointer".into()));
        }
        let c: PicClass = text.parse().map_err(parse_err)?;
        *out = Box::into_raw(Box::new(HoraceClass(c)));
        Ok(())
    })
}

/// # Safety
/// `c` is null or a live handle from [`horace_class_parse`].
#[no_mangle]
pub unsafe extern "C" fn horace_class_free(c: *mut HoraceClass) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

unsafe fn class_int(
    c: *const HoraceClass,
    out: *mut i64,
    f: fn(&PicClass) -> Result<i64, picard::PicardError>,
) -> HoraceStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err((HoraceStatus::NullPointer, "null argument".into()));
        }
        *out = f(&(*c).0).map_err(compute_err)?;
        Ok(())
    })
}

/// # Safety
/// `c` is a live class handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_class_chi(c: *const HoraceClass, out: *mut i64) -> HoraceStatus {
    class_int(c, out, picard::chi)
}

/// # Safety
/// `c` is a live class handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_class_genus(c: *const HoraceClass, out: *mut i64) -> HoraceStatus {
    class_int(c, out, picard::genus)
}

/// # Safety
/// `c` is a live class handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_class_expected_dim(c: *const HoraceClass, out: *mut i64) -> HoraceStatus {
    class_int(c, out, picard::expected_dim)
}

/// Canonical notation of the class.
///
/// # Safety
/// `c` is a live class handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_class_to_string(c: *const HoraceClass, out: *mut *mut c_char) -> HoraceStatus {
    guard(|| {
        if c.is_null() {
            return Err((HoraceStatus::NullPointer, "null class".into()));
        }
        write_string(out, (*c).0.to_string())
    })
}

/// Parses scheme notation. `curve_degree == 0` means no reference curve.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_scheme_parse(
    text: *const c_char,
    curve_degree: u32,
    out: *mut *mut HoraceScheme,
) -> HoraceStatus {
    guard(|| {
        let text = read_str(text)?;
        if out.is_null() {
            return Err((HoraceStatus::NullPointer, "null output pointer".into()));
        }
        let curve = (curve_degree > 0).then_some(CurveDescriptor::Generic(curve_degree));
        let z = ZeroScheme::parse(text, curve).map_err(parse_err)?;
        *out = Box::into_raw(Box::new(HoraceScheme(z)));
        Ok(())
    })
}

/// # Safety
/// `z` is null or a live handle from [`horace_scheme_parse`].
#[no_mangle]
pub unsafe extern "C" fn horace_scheme_free(z: *mut HoraceScheme) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// Number of linear conditions the scheme imposes.
///
/// # Safety
/// `z` is a live scheme handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_scheme_degree(z: *const HoraceScheme, out: *mut u64) -> HoraceStatus {
    guard(|| {
        if z.is_null() || out.is_null() {
            return Err((HoraceStatus::NullPointer, "null argument".into()));
        }
        *out = (*z).0.degree();
        Ok(())
    })
}

/// Rank report (JSON) for degree-`d` forms through `z`. `curve_degree == 0`
/// uses the scheme's own curve.
///
/// # Safety
/// `z` is a live scheme handle; `report_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_oracle_h0(
    z: *const HoraceScheme,
    d: i64,
    curve_degree: u32,
    prime: u64,
    trials: u32,
    seed: u64,
    report_json: *mut *mut c_char,
) -> HoraceStatus {
    guard(|| {
        if z.is_null() {
            return Err((HoraceStatus::NullPointer, "null scheme".into()));
        }
        let field = PrimeField::new(prime).map_err(compute_err)?;
        let a = (curve_degree > 0).then_some(curve_degree);
        let report = oracle::h0(&(*z).0, d, a, field, trials, seed).map_err(compute_err)?;
        write_string(report_json, serde_json::to_string(&report).unwrap())
    })
}

/// Plans a certificate for `class`. `config_json` may be null (no
/// thresholds); axiom mode then fails with a missing-threshold error.
///
/// # Safety
/// String arguments are NUL-terminated or null where allowed; `cert_json`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_plan(
    class: *const c_char,
    m: u32,
    oracle_backed: bool,
    config_json: *const c_char,
    seed: u64,
    cert_json: *mut *mut c_char,
) -> HoraceStatus {
    guard(|| {
        let c: PicClass = read_str(class)?.parse().map_err(parse_err)?;
        let table = if config_json.is_null() {
            ThresholdTable::default()
        } else {
            ThresholdTable::from_json(read_str(config_json)?).map_err(parse_err)?
        };
        let cfg = if oracle_backed {
            PlanConfig::oracle(m, table, seed)
        } else {
            PlanConfig::axiom(m, table)
        };
        let cert = plan_theorem2(&c, &cfg).map_err(compute_err)?;
        write_string(cert_json, serde_json::to_string(&cert).unwrap())
    })
}

/// Verifies a certificate. Returns `Ok` with `*valid` set, or
/// `InvalidCertificate` for malformed input.
///
/// # Safety
/// `cert_json` is NUL-terminated; `valid` is writable.
#[no_mangle]
pub unsafe extern "C" fn horace_verify(cert_json: *const c_char, valid: *mut bool) -> HoraceStatus {
    guard(|| {
        let text = read_str(cert_json)?;
        if valid.is_null() {
            return Err((HoraceStatus::NullPointer, "null output pointer".into()));
        }
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| (HoraceStatus::InvalidCertificate, e.to_string()))?;
        let report = verify_certificate(&v).map_err(|e| (HoraceStatus::InvalidCertificate, e.to_string()))?;
        *valid = report.valid;
        if let Some(r) = report.reason {
            set_error(r);
        }
        Ok(())
    })
}

//! C interface to levynest.
//!
//! Triplets cross the boundary as opaque `LnTriplet` handles created from JSON.
//! Every function returns an `LnStatus`; on failure the message is available from
//! [`ln_last_error_message`] on the same thread. Panics are caught and reported as
//! `LN_ERR_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levynest::classes::class_level;
use levynest::report::to_json_string;
use levynest::transform::apply_phi;
use levynest::{LevyError, LevyTriplet, RunConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Dimension = 3,
    NonFinite = 4,
    Domain = 5,
    NotRepresentable = 6,
    InfiniteMoment = 7,
    NotMeanZero = 8,
    Numerical = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

/// Opaque triplet handle.
pub struct LnTriplet {
    inner: LevyTriplet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &LevyError) -> LnStatus {
    match e {
        LevyError::Dimension { .. } => LnStatus::Dimension,
        LevyError::InvalidInput(_) => LnStatus::InvalidInput,
        LevyError::NonFinite(_) => LnStatus::NonFinite,
        LevyError::Quadrature { .. } | LevyError::Numerical(_) => LnStatus::Numerical,
        LevyError::NotRepresentable(_) => LnStatus::NotRepresentable,
        LevyError::Domain(_) => LnStatus::Domain,
        LevyError::InfiniteMoment(_) => LnStatus::InfiniteMoment,
        LevyError::NotMeanZero(_) => LnStatus::NotMeanZero,
        LevyError::Json(_) => LnStatus::Parse,
        LevyError::Csv(_) | LevyError::Io(_) => LnStatus::Io,
    }
}

struct Fail(LnStatus, String);

impl From<LevyError> for Fail {
    fn from(e: LevyError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(LnStatus::Parse, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LnStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts it to a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> LnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LnStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LnStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(LnStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn read_config(p: *const c_char) -> Result<RunConfig, Fail> {
    if p.is_null() {
        return Ok(RunConfig::default());
    }
    let cfg: RunConfig = serde_json::from_str(read_str(p, "config")?)?;
    cfg.validate()?;
    Ok(cfg)
}

unsafe fn triplet<'a>(h: *const LnTriplet) -> Result<&'a LevyTriplet, Fail> {
    h.as_ref().map(|t| &t.inner).ok_or_else(|| null("triplet"))
}

unsafe fn point<'a>(z: *const f64, len: usize, t: &LevyTriplet) -> Result<&'a [f64], Fail> {
    if z.is_null() {
        return Err(null("z"));
    }
    if len != t.d {
        return Err(LevyError::Dimension { expected: t.d, got: len }.into());
    }
    Ok(std::slice::from_raw_parts(z, len))
}

fn into_handle(t: LevyTriplet) -> *mut LnTriplet {
    Box::into_raw(Box::new(LnTriplet { inner: t }))
}

/// Parses and validates a triplet from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ln_triplet_from_json(json: *const c_char, out: *mut *mut LnTriplet) -> LnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = LevyTriplet::from_json(read_str(json, "json")?)?;
        *out = into_handle(t);
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ln_triplet_free(t: *mut LnTriplet) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Serializes a triplet; free the string with [`ln_string_free`].
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ln_triplet_to_json(t: *const LnTriplet, out: *mut *mut c_char) -> LnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = to_json_string(triplet(t)?)?;
        *out = CString::new(s).map_err(|e| Fail(LnStatus::Io, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ln_triplet_dim(t: *const LnTriplet, out: *mut usize) -> LnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = triplet(t)?.d;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ln_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Log characteristic function C_μ(z).
///
/// # Safety
/// `z` must point to `len` doubles; `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ln_cumulant(
    t: *const LnTriplet,
    z: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> LnStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let t = triplet(t)?;
        let c = t.cumulant(point(z, len, t)?)?;
        *re = c.re;
        *im = c.im;
        Ok(())
    })
}

/// Characteristic function μ̂(z).
///
/// # Safety
/// As for [`ln_cumulant`].
#[no_mangle]
pub unsafe extern "C" fn ln_char_fn(
    t: *const LnTriplet,
    z: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> LnStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let t = triplet(t)?;
        let c = t.char_fn(point(z, len, t)?)?;
        *re = c.re;
        *im = c.im;
        Ok(())
    })
}

/// Applies Φ_α. Returns `LN_ERR_DOMAIN` when μ lies outside the domain.
///
/// # Safety
/// `t` must be a live handle, `config_json` null or a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ln_apply_phi(
    t: *const LnTriplet,
    alpha: f64,
    config_json: *const c_char,
    out: *mut *mut LnTriplet,
) -> LnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = read_config(config_json)?;
        let res = apply_phi(triplet(t)?, alpha, &cfg)?;
        match res.output {
            Some(o) => {
                *out = into_handle(o);
                Ok(())
            }
            None => Err(Fail(LnStatus::Domain, format!("outside the domain of Phi_{alpha}: {}", res.domain.note))),
        }
    })
}

/// Membership in L<α>_m: writes the verdict (0 or 1) and the signed margin.
///
/// # Safety
/// `t` must be a live handle, `config_json` null or a NUL-terminated string,
/// `verdict` and `margin` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ln_class_level(
    t: *const LnTriplet,
    alpha: f64,
    m: u32,
    config_json: *const c_char,
    verdict: *mut i32,
    margin: *mut f64,
) -> LnStatus {
    guard(|| {
        if verdict.is_null() || margin.is_null() {
            return Err(null("output"));
        }
        let cfg = read_config(config_json)?;
        let rep = class_level(triplet(t)?, alpha, m, &cfg)?;
        *verdict = rep.verdict as i32;
        *margin = rep.margin;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn ln_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ln_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSS: &str = r#"{"d":1,"A":[[2.0]],"gamma":[0.5],"centering":"compensated","nu":[]}"#;

    fn handle(json: &str) -> *mut LnTriplet {
        let c = CString::new(json).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ln_triplet_from_json(c.as_ptr(), &mut h) }, LnStatus::Ok);
        h
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ln_last_error_message()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn gaussian_cumulant() {
        let h = handle(GAUSS);
        let (mut re, mut im) = (0.0, 0.0);
        let z = [1.5];
        assert_eq!(unsafe { ln_cumulant(h, z.as_ptr(), 1, &mut re, &mut im) }, LnStatus::Ok);
        assert!((re + 2.25).abs() < 1e-15 && (im - 0.75).abs() < 1e-15);
        assert!(ln_last_error_message().is_null());
        unsafe { ln_triplet_free(h) };
    }

    #[test]
    fn wrong_dimension_is_reported() {
        let h = handle(GAUSS);
        let (mut re, mut im) = (0.0, 0.0);
        let z = [1.0, 2.0];
        assert_eq!(unsafe { ln_cumulant(h, z.as_ptr(), 2, &mut re, &mut im) }, LnStatus::Dimension);
        assert!(last_error().contains("dimension"));
        unsafe { ln_triplet_free(h) };
    }

    #[test]
    fn null_handles() {
        let mut d = 0usize;
        assert_eq!(unsafe { ln_triplet_dim(ptr::null(), &mut d) }, LnStatus::NullPointer);
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ln_triplet_from_json(ptr::null(), &mut h) }, LnStatus::NullPointer);
        assert!(h.is_null());
        unsafe { ln_triplet_free(ptr::null_mut()) };
        unsafe { ln_string_free(ptr::null_mut()) };
    }

    #[test]
    fn bad_json_and_invalid_triplets() {
        let mut h = ptr::null_mut();
        let c = CString::new("{").unwrap();
        assert_eq!(unsafe { ln_triplet_from_json(c.as_ptr(), &mut h) }, LnStatus::Parse);
        let c = CString::new(r#"{"d":1,"A":[[-1.0]],"gamma":[0.0],"centering":"compensated","nu":[]}"#).unwrap();
        assert_eq!(unsafe { ln_triplet_from_json(c.as_ptr(), &mut h) }, LnStatus::InvalidInput);
        assert!(h.is_null());
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(ln_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

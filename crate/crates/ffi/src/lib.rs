//! C ABI for `diamag`.
//!
//! Every entry point returns a [`DiamagStatus`]; results go through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`diamag_last_error`]. Finite-box spectra are passed around as opaque
//! [`DiamagSpectrum`] handles that the caller releases with
//! [`diamag_spectrum_free`].

use diamag::bulk::{pressure_bulk, susceptibility_bulk, BulkMethod, ThermoParams, LEVEL_TOL};
use diamag::finite_gas::{pressure_eigsum, susceptibility_finite, ChiMethod, FdOptions, FiniteBox};
use diamag::special_fn::f_value;
use diamag::spectrum::{BoxGrid, Spectrum};
use diamag::{Complex64, Error, Statistics};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiamagStatus {
    DiamagOk = 0,
    /// A required pointer argument was null.
    DiamagErrNull = 1,
    /// An argument is outside the admissible region.
    DiamagErrDomain = 2,
    /// Bad enumeration value or unsupported request.
    DiamagErrConfig = 3,
    /// A numerical routine failed or refused.
    DiamagErrNumerical = 4,
    /// Internal panic; the library state is unaffected but the call failed.
    DiamagErrPanic = 5,
}

use DiamagStatus::*;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiamagComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for DiamagComplex {
    fn from(c: Complex64) -> Self {
        DiamagComplex { re: c.re, im: c.im }
    }
}

impl From<DiamagComplex> for Complex64 {
    fn from(c: DiamagComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

pub const DIAMAG_BOSE: i32 = 1;
pub const DIAMAG_FERMI: i32 = -1;

pub const DIAMAG_METHOD_EIG_FD: i32 = 0;
pub const DIAMAG_METHOD_CONTOUR_FD: i32 = 1;
pub const DIAMAG_METHOD_HELLMANN: i32 = 2;

/// Eigenvalues of the discretized box Hamiltonian at a fixed field.
pub struct DiamagSpectrum {
    inner: Spectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DiamagStatus {
    match e {
        Error::Domain(_) => DiamagErrDomain,
        Error::Config(_) | Error::Unsupported(_) => DiamagErrConfig,
        _ => DiamagErrNumerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DiamagStatus>) -> DiamagStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiamagOk,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            DiamagErrPanic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, DiamagStatus>;
}

impl<T> Lift<T> for diamag::Result<T> {
    fn lift(self) -> Result<T, DiamagStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, DiamagStatus> {
    // SAFETY: the caller promises `p` is null or valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error(format!("null pointer for {what}"));
        DiamagErrNull
    })
}

fn stats(code: i32) -> Result<Statistics, DiamagStatus> {
    match code {
        DIAMAG_BOSE => Ok(Statistics::Bose),
        DIAMAG_FERMI => Ok(Statistics::Fermi),
        other => {
            set_error(format!("statistics code {other} is neither DIAMAG_BOSE nor DIAMAG_FERMI"));
            Err(DiamagErrConfig)
        }
    }
}

fn method(code: i32) -> Result<ChiMethod, DiamagStatus> {
    match code {
        DIAMAG_METHOD_EIG_FD => Ok(ChiMethod::EigFd),
        DIAMAG_METHOD_CONTOUR_FD => Ok(ChiMethod::ContourFd),
        DIAMAG_METHOD_HELLMANN => Ok(ChiMethod::Hellmann),
        other => {
            set_error(format!("unknown method code {other}"));
            Err(DiamagErrConfig)
        }
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn diamag_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `f_sigma(zeta)` for the given statistics.
#[no_mangle]
pub extern "C" fn diamag_f_value(sigma: f64, zeta: DiamagComplex, statistics: i32, result: *mut DiamagComplex) -> DiamagStatus {
    guard(|| {
        let r = out(result, "result")?;
        *r = f_value(sigma, zeta.into(), stats(statistics)?).lift()?.into();
        Ok(())
    })
}

/// Bulk pressure from the Landau-level sum.
#[no_mangle]
pub extern "C" fn diamag_bulk_pressure(
    beta: f64,
    omega: f64,
    statistics: i32,
    z: DiamagComplex,
    result: *mut DiamagComplex,
) -> DiamagStatus {
    guard(|| {
        let r = out(result, "result")?;
        let p = ThermoParams::new(beta, omega, stats(statistics)?, z.into()).lift()?;
        *r = pressure_bulk(&p, LEVEL_TOL).lift()?.value.into();
        Ok(())
    })
}

/// `d^order P / d omega^order` of the bulk gas. `error_estimate` may be null.
#[no_mangle]
pub extern "C" fn diamag_bulk_chi(
    beta: f64,
    omega: f64,
    statistics: i32,
    z: DiamagComplex,
    order: u32,
    result: *mut DiamagComplex,
    error_estimate: *mut f64,
) -> DiamagStatus {
    guard(|| {
        let r = out(result, "result")?;
        let p = ThermoParams::new(beta, omega, stats(statistics)?, z.into()).lift()?;
        let s = susceptibility_bulk(&p, order, BulkMethod::Analytic).lift()?;
        *r = s.value.into();
        // SAFETY: null or valid for writes, per the contract above.
        if let Some(e) = unsafe { error_estimate.as_mut() } {
            *e = s.error_estimate;
        }
        Ok(())
    })
}

/// Spectrum of the Dirichlet box of side `side` with `n` interior points per
/// axis of the cross-section. `beta` sets how many longitudinal levels are
/// kept. Release the handle with `diamag_spectrum_free`.
#[no_mangle]
pub extern "C" fn diamag_spectrum_new(side: f64, n: usize, beta: f64, omega: f64, handle: *mut *mut DiamagSpectrum) -> DiamagStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        *h = ptr::null_mut();
        let bx = FiniteBox::new(BoxGrid::new(side, n, 2).lift()?, beta).lift()?;
        let inner = bx.spectrum(omega).lift()?;
        *h = Box::into_raw(Box::new(DiamagSpectrum { inner }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from `diamag_spectrum_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diamag_spectrum_free(handle: *mut DiamagSpectrum) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

fn spectrum<'a>(handle: *const DiamagSpectrum) -> Result<&'a Spectrum, DiamagStatus> {
    // SAFETY: the caller promises a live handle or null.
    unsafe { handle.as_ref() }.map(|s| &s.inner).ok_or_else(|| {
        set_error("null spectrum handle".into());
        DiamagErrNull
    })
}

/// Number of levels held by `handle`.
#[no_mangle]
pub extern "C" fn diamag_spectrum_len(handle: *const DiamagSpectrum, len: *mut usize) -> DiamagStatus {
    guard(|| {
        let l = out(len, "len")?;
        *l = spectrum(handle)?.eigenvalues.len();
        Ok(())
    })
}

/// Copies up to `capacity` levels in increasing order into `buffer` and
/// stores the number copied in `written` (which may be null).
#[no_mangle]
pub extern "C" fn diamag_spectrum_copy(
    handle: *const DiamagSpectrum,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> DiamagStatus {
    guard(|| {
        let s = spectrum(handle)?;
        let k = capacity.min(s.eigenvalues.len());
        if k > 0 {
            if buffer.is_null() {
                set_error("null buffer".into());
                return Err(DiamagErrNull);
            }
            // SAFETY: `buffer` holds at least `capacity >= k` doubles.
            unsafe { ptr::copy_nonoverlapping(s.eigenvalues.as_ptr(), buffer, k) };
        }
        // SAFETY: null or valid for writes.
        if let Some(w) = unsafe { written.as_mut() } {
            *w = k;
        }
        Ok(())
    })
}

/// Box pressure from the level sum over `handle` (at the field it was built with).
#[no_mangle]
pub extern "C" fn diamag_finite_pressure(
    handle: *const DiamagSpectrum,
    beta: f64,
    statistics: i32,
    z: DiamagComplex,
    result: *mut DiamagComplex,
) -> DiamagStatus {
    guard(|| {
        let r = out(result, "result")?;
        let s = spectrum(handle)?;
        let p = ThermoParams::new(beta, s.omega, stats(statistics)?, z.into()).lift()?;
        *r = pressure_eigsum(s, &p).lift()?.value.into();
        Ok(())
    })
}

/// `d^order P_L / d omega^order` in the box, with one of the
/// `DIAMAG_METHOD_*` codes. `error_estimate` may be null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn diamag_finite_chi(
    side: f64,
    n: usize,
    beta: f64,
    omega: f64,
    statistics: i32,
    z: DiamagComplex,
    order: u32,
    method_code: i32,
    result: *mut DiamagComplex,
    error_estimate: *mut f64,
) -> DiamagStatus {
    guard(|| {
        let r = out(result, "result")?;
        let m = method(method_code)?;
        let p = ThermoParams::new(beta, omega, stats(statistics)?, z.into()).lift()?;
        let bx = FiniteBox::new(BoxGrid::new(side, n, 2).lift()?, beta).lift()?;
        let c = susceptibility_finite(&bx, &p, order, m, &FdOptions::default()).lift()?;
        *r = c.value.into();
        // SAFETY: null or valid for writes.
        if let Some(e) = unsafe { error_estimate.as_mut() } {
            *e = c.error_estimate;
        }
        Ok(())
    })
}

//! C ABI for `zollcut`.
//!
//! Every fallible function returns a [`ZcStatus`]; on failure a message is
//! available from [`zc_last_error_message`] on the calling thread. Objects
//! are opaque handles created by `*_new` functions and released with the
//! matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use zollcut::experiments::{cut_q, szego_check};
use zollcut::{coherent_state, husimi, BargmannState, Error, GridSpec, Propagator, SimulationScale, SpectralFunction};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimMismatch = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Io = 6,
    Panic = 7,
}

/// Codes for the `f` argument of [`zc_szego_check`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZcFunction {
    Id = 0,
    Square = 1,
    Quartic = 2,
    Cos = 3,
}

fn spectral_function(code: u32) -> Result<SpectralFunction, Fail> {
    match code {
        c if c == ZcFunction::Id as u32 => Ok(SpectralFunction::Id),
        c if c == ZcFunction::Square as u32 => Ok(SpectralFunction::Square),
        c if c == ZcFunction::Quartic as u32 => Ok(SpectralFunction::Quartic),
        c if c == ZcFunction::Cos as u32 => Ok(SpectralFunction::Cos),
        other => Err(Fail(ZcStatus::InvalidArgument, format!("unknown function code {other}"))),
    }
}

/// Outcome of a trace-versus-integral comparison.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZcSzegoResult {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
    /// `abs_error / ln N`; NaN for `N < 2`.
    pub normalized_error: f64,
    /// Whether every built-in reference check passed.
    pub pass: bool,
}

/// Coefficients of a Bargmann-space state.
pub struct ZcState(BargmannState);

/// Propagator `e^{−itN ΠQ̂Π}` for one `N` and energy cutoff.
pub struct ZcPropagator(Propagator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ZcStatus {
    match e {
        Error::InvalidArgument(_) | Error::Hypothesis(_) | Error::Config(_) => ZcStatus::InvalidArgument,
        Error::DimMismatch { .. } | Error::ScaleMismatch { .. } => ZcStatus::DimMismatch,
        Error::NonFiniteFlow { .. }
        | Error::NonFiniteFunction { .. }
        | Error::CoherentUnderflow { .. }
        | Error::NoConvergence { .. } => ZcStatus::Numerical,
        Error::Io(_) | Error::Json(_) => ZcStatus::Io,
    }
}

/// Failure carried out of a guarded body.
struct Fail(ZcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ZcStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(body: F) -> ZcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ZcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(format!("panic: {msg}"));
            ZcStatus::Panic
        }
    }
}

/// Message of the most recent failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn zc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Coherent state at `w = w_re + i·w_im` for `ℏ = 1/n`, projected onto the
/// basis indices `0..=floor(n·energy)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn zc_coherent_state_new(
    n: u32,
    w_re: f64,
    w_im: f64,
    energy: f64,
    out: *mut *mut ZcState,
) -> ZcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Fail(ZcStatus::InvalidArgument, format!("energy must be positive, got {energy}")));
        }
        let scale = SimulationScale::new(n)?;
        let st = coherent_state(Complex64::new(w_re, w_im), scale, scale.cutoff_index(energy))?;
        // SAFETY: checked non-null; caller guarantees it is writable.
        unsafe { *out = Box::into_raw(Box::new(ZcState(st))) };
        Ok(())
    })
}

/// State with the given coefficients for `ℏ = 1/n`.
///
/// # Safety
/// `re` and `im` must each point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn zc_state_from_coeffs(
    n: u32,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut ZcState,
) -> ZcStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("coefficient buffer"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller guarantees `len` readable elements behind each pointer.
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len)) };
        let coeffs = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let st = BargmannState::new(SimulationScale::new(n)?, coeffs)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(ZcState(st))) };
        Ok(())
    })
}

/// Releases a state; NULL is ignored.
///
/// # Safety
/// `state` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zc_state_free(state: *mut ZcState) {
    if !state.is_null() {
        // SAFETY: caller guarantees the handle came from Box::into_raw here.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// # Safety
/// `state` must be a live handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn zc_state_len(state: *const ZcState, out_len: *mut usize) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle when non-null.
        let st = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if out_len.is_null() {
            return Err(null("out_len"));
        }
        // SAFETY: checked non-null.
        unsafe { *out_len = st.0.len() };
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out_norm` writable.
#[no_mangle]
pub unsafe extern "C" fn zc_state_norm(state: *const ZcState, out_norm: *mut f64) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle when non-null.
        let st = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if out_norm.is_null() {
            return Err(null("out_norm"));
        }
        // SAFETY: checked non-null.
        unsafe { *out_norm = st.0.norm() };
        Ok(())
    })
}

/// Copies the coefficients into `re[0..len)` and `im[0..len)`; `len` must be
/// at least the state length.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must each have room for
/// `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zc_state_coeffs(state: *const ZcState, re: *mut f64, im: *mut f64, len: usize) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle when non-null.
        let st = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let c = st.0.coeffs();
        if len < c.len() {
            return Err(Fail(
                ZcStatus::BufferTooSmall,
                format!("buffer holds {len} coefficients, state has {}", c.len()),
            ));
        }
        // SAFETY: caller guarantees `len ≥ c.len()` writable elements.
        let (re, im) = unsafe { (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len)) };
        for (k, z) in c.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Propagator for `Π Q̂ Π` with `ℏ = 1/n` and cutoff `floor(n·energy)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_propagator_new_cut_q(n: u32, energy: f64, out: *mut *mut ZcPropagator) -> ZcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Fail(ZcStatus::InvalidArgument, format!("energy must be positive, got {energy}")));
        }
        let prop = Propagator::new(&cut_q(SimulationScale::new(n)?, energy)?)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(ZcPropagator(prop))) };
        Ok(())
    })
}

/// # Safety
/// `prop` must be a live handle and `out_dim` writable.
#[no_mangle]
pub unsafe extern "C" fn zc_propagator_dim(prop: *const ZcPropagator, out_dim: *mut usize) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle when non-null.
        let p = unsafe { prop.as_ref() }.ok_or_else(|| null("propagator"))?;
        if out_dim.is_null() {
            return Err(null("out_dim"));
        }
        // SAFETY: checked non-null.
        unsafe { *out_dim = p.0.dim() };
        Ok(())
    })
}

/// Evolves `state` to time `t` into a new handle.
///
/// # Safety
/// `prop` and `state` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_propagator_apply(
    prop: *const ZcPropagator,
    state: *const ZcState,
    t: f64,
    out: *mut *mut ZcState,
) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees live handles when non-null.
        let p = unsafe { prop.as_ref() }.ok_or_else(|| null("propagator"))?;
        let st = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let next = p.0.propagate(&st.0, t)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(ZcState(next))) };
        Ok(())
    })
}

/// Releases a propagator; NULL is ignored.
///
/// # Safety
/// `prop` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zc_propagator_free(prop: *mut ZcPropagator) {
    if !prop.is_null() {
        // SAFETY: caller guarantees the handle came from Box::into_raw here.
        drop(unsafe { Box::from_raw(prop) });
    }
}

/// Husimi density of `state` on an `nx × np` grid with inclusive bounds,
/// written row-major (`out[i*np + j]` at `x_i`, `p_j`).
///
/// # Safety
/// `state` must be a live handle; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zc_husimi_fill(
    state: *const ZcState,
    nx: usize,
    np: usize,
    xmin: f64,
    xmax: f64,
    pmin: f64,
    pmax: f64,
    out: *mut f64,
    len: usize,
) -> ZcStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle when non-null.
        let st = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = nx.checked_mul(np).ok_or_else(|| Fail(ZcStatus::InvalidArgument, "grid too large".into()))?;
        if len < need {
            return Err(Fail(ZcStatus::BufferTooSmall, format!("buffer holds {len} values, grid needs {need}")));
        }
        let grid = husimi(&st.0, &GridSpec { nx, np, xmin, xmax, pmin, pmax })?;
        // SAFETY: caller guarantees `len ≥ need` writable elements.
        let dst = unsafe { std::slice::from_raw_parts_mut(out, need) };
        dst.copy_from_slice(grid.values());
        Ok(())
    })
}

/// Trace of `f(ΠQ̂Π)` against `(N/2π)∫_{P≤E} f∘Q`; `f` is a [`ZcFunction`]
/// value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_szego_check(f: u32, n: u32, energy: f64, out: *mut ZcSzegoResult) -> ZcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = szego_check(spectral_function(f)?, n, energy)?;
        let res = ZcSzegoResult {
            lhs: r.get("lhs").unwrap_or(f64::NAN),
            rhs: r.get("rhs").unwrap_or(f64::NAN),
            abs_error: r.get("abs_error").unwrap_or(f64::NAN),
            normalized_error: r.get("normalized_error").unwrap_or(f64::NAN),
            pass: r.pass,
        };
        // SAFETY: checked non-null.
        unsafe { *out = res };
        Ok(())
    })
}

//! C ABI over `xxchain`: opaque handles, status codes and a per-thread last error.
//!
//! Every fallible function returns an [`XxStatus`]. On failure the message is
//! kept for the calling thread and can be read with [`xx_last_error`].
//! Handles returned through out-pointers are owned by the caller and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xxchain::dynamics::{propagate, InitialState};
use xxchain::global_me::{build_global_liouvillian, Approach, LambShiftSpec, Liouvillian};
use xxchain::local_me::build_local_liouvillian;
use xxchain::model::{Bath, LocalFrequency, ModelParams};
use xxchain::spin_algebra::Basis;
use xxchain::steady_state::{global_steady_analytic, steady_numeric, DensityMatrix};
use xxchain::transport::{local_heat_current, TransportProbe, TransportReport};
use xxchain::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    DegenerateSpectrum = 4,
    NonUniqueKernel = 5,
    NoKernel = 6,
    NotInRange = 7,
    IllConditioned = 8,
    InvalidState = 9,
    Numerical = 10,
    Panic = 11,
}

impl From<&Error> for XxStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::SiteOutOfRange(_) | Error::NonPositiveFrequency(_) => {
                XxStatus::InvalidParams
            }
            Error::DegenerateSpectrum { .. } => XxStatus::DegenerateSpectrum,
            Error::NonUniqueKernel { .. } => XxStatus::NonUniqueKernel,
            Error::NoKernel { .. } => XxStatus::NoKernel,
            Error::NotInRange { .. } => XxStatus::NotInRange,
            Error::IllConditioned(_) => XxStatus::IllConditioned,
            Error::InvalidState(_) | Error::BasisMismatch { .. } => XxStatus::InvalidState,
            Error::WrongApproach { .. } => XxStatus::InvalidArgument,
            Error::NonFinite | Error::QuadratureFailure(_) | Error::Numerical(_) => XxStatus::Numerical,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XxApproach {
    Global = 0,
    Local = 1,
}

impl From<XxApproach> for Approach {
    fn from(a: XxApproach) -> Self {
        match a {
            XxApproach::Global => Approach::Global,
            XxApproach::Local => Approach::Local,
        }
    }
}

/// Transport observables of one state. Heat currents use the boundary
/// dissipator of the generator the report was computed with.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XxTransport {
    pub j12: f64,
    pub j23: f64,
    pub q_left: f64,
    pub q_right: f64,
    pub sigma_z2_rate: f64,
    pub heat_left: f64,
    pub heat_right: f64,
}

/// Model parameters.
pub struct XxParams {
    inner: ModelParams,
}

/// A built generator together with its transport observables.
pub struct XxLiouvillian {
    inner: Liouvillian,
    probe: TransportProbe,
}

/// A normalized density matrix in the computational basis.
pub struct XxState {
    inner: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Argument(String),
    Model(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> XxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            XxStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as {name}"));
            XxStatus::NullPointer
        }
        Ok(Err(Failure::Argument(msg))) => {
            set_error(msg);
            XxStatus::InvalidArgument
        }
        Ok(Err(Failure::Model(e))) => {
            set_error(e.to_string());
            XxStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            XxStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn to_report(l: &Liouvillian, r: TransportReport, rho: &DensityMatrix) -> Result<XxTransport, Error> {
    let (heat_left, heat_right) = match (r.heat_left, r.heat_right) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let op = rho.as_operator();
            (local_heat_current(l.params(), &op, Bath::Left)?, local_heat_current(l.params(), &op, Bath::Right)?)
        }
    };
    Ok(XxTransport {
        j12: r.j12,
        j23: r.j23,
        q_left: r.q_left,
        q_right: r.q_right,
        sigma_z2_rate: r.sigma_z2_rate,
        heat_left,
        heat_right,
    })
}

/// Copies the last error of the calling thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn xx_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parameters with the same smearing amplitude `h` on both baths.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_params_new(
    g: f64,
    delta: f64,
    lambda: f64,
    h: f64,
    t_left: f64,
    t_right: f64,
    out: *mut *mut XxParams,
) -> XxStatus {
    guard(|| {
        let inner = ModelParams::symmetric(g, delta, lambda, h, t_left, t_right)?;
        write_out(out, XxParams { inner })
    })
}

/// Selects the local boundary frequency: `0` for `2Δ` (default), `1` for `Δ`.
///
/// # Safety
/// `params` must be a live handle from [`xx_params_new`].
#[no_mangle]
pub unsafe extern "C" fn xx_params_set_local_frequency(params: *mut XxParams, reading: i32) -> XxStatus {
    guard(|| {
        let p = params.as_mut().ok_or(Failure::Null("params"))?;
        p.inner.local_frequency = match reading {
            0 => LocalFrequency::TwoDelta,
            1 => LocalFrequency::Delta,
            _ => return Err(Failure::Argument(format!("unknown local frequency reading {reading}"))),
        };
        Ok(())
    })
}

/// Transition frequencies `ω₀, ω₁, ω₂` into `out[0..3]`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for three doubles.
#[no_mangle]
pub unsafe extern "C" fn xx_params_omegas(params: *const XxParams, out: *mut f64) -> XxStatus {
    guard(|| {
        let p = deref(params, "params")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let w = p.inner.omegas();
        ptr::copy_nonoverlapping(w.as_ptr(), out, 3);
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xx_params_free(params: *mut XxParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Builds the global or local generator; `lamb_shift` only affects the global one.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_liouvillian_new(
    params: *const XxParams,
    approach: XxApproach,
    lamb_shift: bool,
    out: *mut *mut XxLiouvillian,
) -> XxStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        let inner = match Approach::from(approach) {
            Approach::Global => {
                let ls = if lamb_shift { LambShiftSpec::enabled() } else { LambShiftSpec::default() };
                build_global_liouvillian(p, &ls)?
            }
            Approach::Local => build_local_liouvillian(p)?,
        };
        let probe = TransportProbe::new(&inner)?;
        write_out(out, XxLiouvillian { inner, probe })
    })
}

/// # Safety
/// `l` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xx_liouvillian_free(l: *mut XxLiouvillian) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Copies the 64×64 superoperator (column-stacking convention) in row-major
/// order into `re` and `im`, each of length `len >= 4096`.
///
/// # Safety
/// `l` must be a live handle; `re` and `im` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xx_liouvillian_matrix(
    l: *const XxLiouvillian,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> XxStatus {
    guard(|| {
        let m = deref(l, "liouvillian")?.inner.matrix();
        copy_row_major(m.nrows(), m.ncols(), |i, j| m[(i, j)], re, im, len)
    })
}

unsafe fn copy_row_major(
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> num_complex::Complex64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> Result<(), Failure> {
    if re.is_null() || im.is_null() {
        return Err(Failure::Null("re/im"));
    }
    if len < rows * cols {
        return Err(Failure::Argument(format!("buffer holds {len} entries, need {}", rows * cols)));
    }
    for i in 0..rows {
        for j in 0..cols {
            let z = at(i, j);
            *re.add(i * cols + j) = z.re;
            *im.add(i * cols + j) = z.im;
        }
    }
    Ok(())
}

/// Unique steady state from the null space of the generator.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_steady_numeric(l: *const XxLiouvillian, out: *mut *mut XxState) -> XxStatus {
    guard(|| {
        let inner = steady_numeric(&deref(l, "liouvillian")?.inner)?;
        write_out(out, XxState { inner })
    })
}

/// Closed-form global steady state.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_steady_global_analytic(params: *const XxParams, out: *mut *mut XxState) -> XxStatus {
    guard(|| {
        let (rho, _) = global_steady_analytic(&deref(params, "params")?.inner)?;
        write_out(out, XxState { inner: rho.to_basis(Basis::Computational) })
    })
}

/// Computational basis projector such as `"011"`; site 1 is the leftmost bit.
///
/// # Safety
/// `bits` must be a NUL-terminated string; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_state_basis(bits: *const c_char, out: *mut *mut XxState) -> XxStatus {
    guard(|| {
        if bits.is_null() {
            return Err(Failure::Null("bits"));
        }
        let label = CStr::from_ptr(bits).to_str().map_err(|e| Failure::Argument(e.to_string()))?;
        let inner = InitialState::Basis(label.to_string()).density()?;
        write_out(out, XxState { inner })
    })
}

/// Density matrix from row-major real and imaginary parts of length 64.
///
/// # Safety
/// `re` and `im` must be valid for 64 doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx_state_from_entries(re: *const f64, im: *const f64, out: *mut *mut XxState) -> XxStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("re/im"));
        }
        let m = xxchain::spin_algebra::Matrix8::from_fn(|i, j| {
            num_complex::Complex64::new(*re.add(i * 8 + j), *im.add(i * 8 + j))
        });
        let inner = DensityMatrix::new(m, Basis::Computational)?;
        write_out(out, XxState { inner })
    })
}

/// Row-major entries of the 8×8 density matrix into `re` and `im` (`len >= 64`).
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xx_state_entries(state: *const XxState, re: *mut f64, im: *mut f64, len: usize) -> XxStatus {
    guard(|| {
        let m = deref(state, "state")?.inner.matrix();
        copy_row_major(8, 8, |i, j| m[(i, j)], re, im, len)
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xx_state_free(state: *mut XxState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Transport observables of `state` under `l`.
///
/// # Safety
/// Both handles must be live; `out` must be valid for one [`XxTransport`].
#[no_mangle]
pub unsafe extern "C" fn xx_transport(
    l: *const XxLiouvillian,
    state: *const XxState,
    out: *mut XxTransport,
) -> XxStatus {
    guard(|| {
        let l = deref(l, "liouvillian")?;
        let rho = &deref(state, "state")?.inner;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        *out = to_report(&l.inner, l.probe.report(&rho.as_operator())?, rho)?;
        Ok(())
    })
}

/// Evolves `initial` under `l` and writes one report per time into `out`.
/// Times must be finite, non-negative and strictly increasing.
///
/// # Safety
/// Both handles must be live; `times` and `out` must be valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn xx_evolve(
    l: *const XxLiouvillian,
    initial: *const XxState,
    times: *const f64,
    n: usize,
    out: *mut XxTransport,
) -> XxStatus {
    guard(|| {
        let l = deref(l, "liouvillian")?;
        let rho0 = &deref(initial, "initial")?.inner;
        if n == 0 {
            return Ok(());
        }
        if times.is_null() || out.is_null() {
            return Err(Failure::Null("times/out"));
        }
        let times = std::slice::from_raw_parts(times, n);
        let traj = propagate(&l.inner, rho0, times)?;
        for (i, (rho, r)) in traj.states.iter().zip(&traj.reports).enumerate() {
            *out.add(i) = to_report(&l.inner, *r, rho)?;
        }
        Ok(())
    })
}

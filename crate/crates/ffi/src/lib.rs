//! C ABI over the `groundstate` library.
//!
//! Handles are opaque pointers created by the library and released with the
//! matching `*_free`. Every fallible call returns a [`GsStatus`]; after a
//! failure, [`gs_last_error_message`] on the same thread describes it. Panics
//! never cross the boundary: they are caught and reported as `GS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use groundstate::asymptotics::limit_constant;
use groundstate::domain::{functionals, lambda_w, talenti, FunctionalReport, ProblemParams};
use groundstate::pucci_serrin::{check_condition, ScanSpec, Verdict};
use groundstate::radial_ode::{shoot, ShootOptions, ShootingResult};
use groundstate::rescale::{rescale, talenti_distance, DistanceNorm};
use groundstate::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoGroundState = 3,
    Numerical = 4,
    NotFound = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::InvalidDimension(_)
        | Error::InvalidParameter(_)
        | Error::InvalidInput(_)
        | Error::DivergentNorm(_)
        | Error::OutOfRange(_)
        | Error::Config(_) => GsStatus::InvalidArgument,
        Error::NoGroundState { .. } => GsStatus::NoGroundState,
        Error::Stiffness { .. } | Error::IncompleteProfile(_) | Error::IterationLimit(_) => GsStatus::Numerical,
        Error::NotFound(_) => GsStatus::NotFound,
        Error::Io(_) => GsStatus::Io,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (GsStatus, String);

fn fail(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (GsStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status plus the thread's last error.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            GsStatus::Panic
        }
    }
}

/// Message of the last failed call on this thread, or null if none failed yet.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A located ground state with its functionals.
pub struct GsGroundState {
    params: ProblemParams,
    result: ShootingResult,
    report: FunctionalReport,
}

/// `S, N, P, I` and the four norms they are built from.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GsFunctionals {
    pub action: f64,
    pub nehari: f64,
    pub pohozaev: f64,
    pub i_func: f64,
    pub grad_sq: f64,
    pub mass: f64,
    pub lp1: f64,
    pub l2s: f64,
}

/// Rescaled data: coefficients of the rescaled equation and the distance to `W`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GsRescaled {
    pub alpha: f64,
    pub beta: f64,
    pub h1dot_dist: f64,
    pub residual: f64,
}

/// Solve `-Δu + ωu = u^p + u^{(d+2)/(d-2)}` with default tolerances. On success
/// `*out` owns a new handle; release it with [`gs_ground_state_free`].
///
/// # Safety
/// `out` must be null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gs_solve(d: u32, p: f64, omega: f64, out: *mut *mut GsGroundState) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = ProblemParams::new(d, p, omega).map_err(fail)?;
        let result = shoot(&params, &ShootOptions::default()).map_err(fail)?;
        let report = functionals(&result.profile, &params).map_err(fail)?;
        let h = Box::new(GsGroundState { params, result, report });
        *out = Box::into_raw(h);
        Ok(())
    })
}

/// Release a handle from [`gs_solve`]; null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_free(h: *mut GsGroundState) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn handle<'a>(h: *const GsGroundState) -> Result<&'a GsGroundState, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// The central height `u(0)`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_m_star(h: *const GsGroundState, out: *mut f64) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.result.m_star;
        Ok(())
    })
}

/// Number of stored profile nodes.
///
/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_len(h: *const GsGroundState, out: *mut usize) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.result.profile.grid().len();
        Ok(())
    })
}

/// Copy the nodes `r`, values `u` and derivatives `u'` into caller buffers of
/// capacity `cap`. Fails with `GS_STATUS_BUFFER_TOO_SMALL` if `cap` is below
/// [`gs_ground_state_len`].
///
/// # Safety
/// Each buffer must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_copy_profile(
    h: *const GsGroundState,
    r: *mut f64,
    u: *mut f64,
    du: *mut f64,
    cap: usize,
) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        if r.is_null() || u.is_null() || du.is_null() {
            return Err(null("buffer"));
        }
        let prof = &g.result.profile;
        let n = prof.grid().len();
        if cap < n {
            return Err((GsStatus::BufferTooSmall, format!("need {n} entries, got {cap}")));
        }
        std::slice::from_raw_parts_mut(r, n).copy_from_slice(prof.grid().nodes());
        std::slice::from_raw_parts_mut(u, n).copy_from_slice(prof.values());
        std::slice::from_raw_parts_mut(du, n).copy_from_slice(prof.derivs());
        Ok(())
    })
}

/// `u(r)` and `u'(r)` at any `r >= 0`, including the core and tail models.
///
/// # Safety
/// `h` must be a live handle; `u` and `du` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_eval(h: *const GsGroundState, r: f64, u: *mut f64, du: *mut f64) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err((GsStatus::InvalidArgument, format!("radius must be finite and >= 0, got {r}")));
        }
        let (u, du) = (u.as_mut().ok_or_else(|| null("u"))?, du.as_mut().ok_or_else(|| null("du"))?);
        (*u, *du) = g.result.profile.eval(r);
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_functionals(h: *const GsGroundState, out: *mut GsFunctionals) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = &g.report;
        *out = GsFunctionals {
            action: r.action,
            nehari: r.nehari,
            pohozaev: r.pohozaev,
            i_func: r.i_func,
            grad_sq: r.grad_sq,
            mass: r.mass,
            lp1: r.lp1,
            l2s: r.l2s,
        };
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_state_rescaled(h: *const GsGroundState, out: *mut GsRescaled) -> GsStatus {
    guard(|| {
        let g = handle(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let st = rescale(&g.result, &g.params).map_err(fail)?;
        let dist = talenti_distance(&st, &[DistanceNorm::H1Dot]).map_err(fail)?;
        *out = GsRescaled { alpha: st.alpha, beta: st.beta, h1dot_dist: dist[0].1, residual: st.residual() };
        Ok(())
    })
}

/// `W(r)`, the Talenti bubble normalized by `W(0) = 1`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_talenti(d: u32, r: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = talenti(d, r).map_err(fail)?;
        Ok(())
    })
}

/// `ΛW(r) = (d-2)/2 W + r W'`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_lambda_w(d: u32, r: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lambda_w(d, r).map_err(fail)?;
        Ok(())
    })
}

/// Large-frequency limit of `β/α`; `GS_STATUS_INVALID_ARGUMENT` when a norm of `W` diverges.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_limit_constant(d: u32, p: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = limit_constant(d, p).map_err(fail)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsVerdict {
    Holds = 0,
    Fails = 1,
    Inconclusive = 2,
}

/// Outcome of the Pucci–Serrin check. The witness fields are meaningful only
/// when `has_witness` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsPsSummary {
    pub verdict: GsVerdict,
    /// `A_2, A_{p+1}, A_{q+1}, A_{2p}, A_{p+q}`.
    pub coefficients: [f64; 5],
    pub g_min: f64,
    pub u_min: f64,
    pub has_witness: bool,
    pub witness_omega: f64,
    pub witness_u: f64,
    pub witness_g: f64,
}

/// Run the Pucci–Serrin check with the default scan.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gs_pscheck(d: u32, p: f64, omega: f64, out: *mut GsPsSummary) -> GsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rep = check_condition(d, p, omega, &ScanSpec::default()).map_err(fail)?;
        let verdict = match rep.verdict {
            Verdict::Holds => GsVerdict::Holds,
            Verdict::Fails => GsVerdict::Fails,
            Verdict::Inconclusive => GsVerdict::Inconclusive,
        };
        let w = rep.witness;
        *out = GsPsSummary {
            verdict,
            coefficients: rep.coefficients.as_array(),
            g_min: rep.g_min.g,
            u_min: rep.g_min.u,
            has_witness: w.is_some(),
            witness_omega: w.map_or(f64::NAN, |w| w.omega),
            witness_u: w.map_or(f64::NAN, |w| w.u),
            witness_g: w.map_or(f64::NAN, |w| w.g),
        };
        Ok(())
    })
}

//! C ABI for the entlab library.
//!
//! Density matrices cross the boundary as 16 row-major [`EntlabComplex`]
//! entries. Every fallible call returns an [`EntlabStatus`]; on failure
//! [`entlab_last_error`] gives a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entlab::control::{optimize_mu1, Objective};
use entlab::dynamics::{propagate, stationary_numeric, ModelSpec, PropagateSettings, Trajectory};
use entlab::entangle::{kappa_of, state_concurrence, DephasingNoise};
use entlab::physmodel::{build_channel, ChannelKind, ControlParams};
use entlab::qmat::{ComplexMat4, DensityMatrix, C64};
use entlab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericFailure = 3,
    Unsupported = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntlabChannel {
    Independent = 0,
    Collective = 1,
    Mixed = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntlabComplex {
    pub re: f64,
    pub im: f64,
}

/// Model parameters. A NaN `gamma12` selects the channel default.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntlabModelParams {
    pub channel: EntlabChannel,
    pub gamma: f64,
    pub gamma12: f64,
    pub eta0: f64,
    pub mu1: f64,
    pub phi1: f64,
    pub mu2: f64,
    pub phi2: f64,
}

/// Opaque model handle.
pub struct EntlabModel {
    inner: ModelSpec,
}

/// Opaque trajectory handle.
pub struct EntlabTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> EntlabStatus {
    match err {
        Error::InvalidState(_)
        | Error::NonHermitianInput { .. }
        | Error::ZeroDetuning
        | Error::InvalidRates(_)
        | Error::InvalidParameter(_)
        | Error::InvalidKappa(_) => EntlabStatus::InvalidArgument,
        Error::UnsupportedChannel(_) => EntlabStatus::Unsupported,
        Error::NoConvergence(_)
        | Error::PositivityLoss { .. }
        | Error::TraceDrift { .. }
        | Error::StepUnderflow { .. }
        | Error::SingularGenerator
        | Error::NegativeSpectrum(_) => EntlabStatus::NumericFailure,
    }
}

struct Fail(EntlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(EntlabStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording its failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EntlabStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntlabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EntlabStatus::Panic
        }
    }
}

unsafe fn read_matrix(p: *const EntlabComplex) -> Result<ComplexMat4, Fail> {
    if p.is_null() {
        return Err(null("matrix"));
    }
    let s = std::slice::from_raw_parts(p, 16);
    let mut v = [C64::new(0.0, 0.0); 16];
    for (z, e) in v.iter_mut().zip(s) {
        *z = C64::new(e.re, e.im);
    }
    Ok(ComplexMat4::from_row_major(&v))
}

unsafe fn read_density(p: *const EntlabComplex) -> Result<DensityMatrix, Fail> {
    Ok(DensityMatrix::new(read_matrix(p)?)?)
}

unsafe fn write_matrix(m: &ComplexMat4, out: *mut EntlabComplex) {
    let s = std::slice::from_raw_parts_mut(out, 16);
    for (e, z) in s.iter_mut().zip(m.to_row_major()) {
        *e = EntlabComplex { re: z.re, im: z.im };
    }
}

fn kind_of(c: EntlabChannel) -> ChannelKind {
    match c {
        EntlabChannel::Independent => ChannelKind::Independent,
        EntlabChannel::Collective => ChannelKind::Collective,
        EntlabChannel::Mixed => ChannelKind::Mixed,
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next entlab call on the same thread.
#[no_mangle]
pub extern "C" fn entlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_model_new(
    params: *const EntlabModelParams,
    out: *mut *mut EntlabModel,
) -> EntlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let ctrl = ControlParams::new(p.mu1, p.phi1, p.mu2, p.phi2)?;
        let gamma12 = (!p.gamma12.is_nan()).then_some(p.gamma12);
        let eta0 = (p.eta0 != 0.0).then_some(p.eta0);
        let channel = build_channel(kind_of(p.channel), p.gamma, gamma12, eta0)?;
        let model = Box::new(EntlabModel {
            inner: ModelSpec::new(&ctrl, channel),
        });
        *out = Box::into_raw(model);
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`entlab_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entlab_model_free(model: *mut EntlabModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Wootters concurrence of a density matrix.
///
/// # Safety
/// `rho` must point to 16 entries and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_concurrence(rho: *const EntlabComplex, out: *mut f64) -> EntlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = state_concurrence(&read_density(rho)?)?;
        Ok(())
    })
}

/// Conserved weight κ of a state under collective decay.
///
/// # Safety
/// `rho` must point to 16 entries and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_kappa(rho: *const EntlabComplex, out: *mut f64) -> EntlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = kappa_of(&read_density(rho)?)?;
        Ok(())
    })
}

/// Stationary state. `rho0` may be null except for the collective channel,
/// whose stationary state depends on it.
///
/// # Safety
/// `rho0` (if non-null) and `out` must point to 16 entries.
#[no_mangle]
pub unsafe extern "C" fn entlab_stationary(
    model: *const EntlabModel,
    rho0: *const EntlabComplex,
    out: *mut EntlabComplex,
) -> EntlabStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rho0 = if rho0.is_null() { None } else { Some(read_density(rho0)?) };
        let rho = stationary_numeric(&model.inner, rho0.as_ref())?;
        write_matrix(rho.mat(), out);
        Ok(())
    })
}

/// Fixed-step RK4 trajectory sampled at `samples + 1` equally spaced times.
/// `dt <= 0` selects the default step.
///
/// # Safety
/// `rho0` must point to 16 entries and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_propagate(
    model: *const EntlabModel,
    rho0: *const EntlabComplex,
    t_max: f64,
    samples: usize,
    dt: f64,
    out: *mut *mut EntlabTrajectory,
) -> EntlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let rho0 = read_density(rho0)?;
        if samples == 0 {
            return Err(Fail(EntlabStatus::InvalidArgument, "samples must be positive".into()));
        }
        let settings = PropagateSettings::fixed((dt > 0.0).then_some(dt), samples);
        let traj = propagate(&rho0, &model.inner, t_max, &settings)?;
        *out = Box::into_raw(Box::new(EntlabTrajectory { inner: traj }));
        Ok(())
    })
}

/// Number of stored samples, 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn entlab_trajectory_len(traj: *const EntlabTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.times.len())
}

/// # Safety
/// `traj` must be a live handle; `t` and `rho` writable (`rho` 16 entries).
#[no_mangle]
pub unsafe extern "C" fn entlab_trajectory_sample(
    traj: *const EntlabTrajectory,
    index: usize,
    t: *mut f64,
    rho: *mut EntlabComplex,
) -> EntlabStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("trajectory"))?;
        if t.is_null() || rho.is_null() {
            return Err(null("output"));
        }
        let n = traj.inner.times.len();
        if index >= n {
            return Err(Fail(EntlabStatus::OutOfRange, format!("index {index} >= length {n}")));
        }
        *t = traj.inner.times[index];
        write_matrix(traj.inner.states[index].mat(), rho);
        Ok(())
    })
}

/// # Safety
/// `traj` must come from [`entlab_propagate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn entlab_trajectory_free(traj: *mut EntlabTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

unsafe fn write_optimum(objective: Objective, mu1_star: *mut f64, c_max: *mut f64) -> Result<(), Fail> {
    if mu1_star.is_null() || c_max.is_null() {
        return Err(null("output"));
    }
    let opt = optimize_mu1(&objective)?;
    *mu1_star = opt.mu1_star;
    *c_max = opt.value;
    Ok(())
}

/// Maximizes the stationary concurrence over μ₁ for independent decay with
/// position noise strengths `gamma1`, `gamma2`.
///
/// # Safety
/// `mu1_star` and `c_max` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_optimize_independent(
    gamma: f64,
    gamma1: f64,
    gamma2: f64,
    mu1_star: *mut f64,
    c_max: *mut f64,
) -> EntlabStatus {
    guard(|| {
        let noise = DephasingNoise::new(gamma1, gamma2)?;
        write_optimum(Objective::Independent { gamma, noise }, mu1_star, c_max)
    })
}

/// Maximizes the stationary concurrence over μ₁ for collective decay at weight `kappa`.
///
/// # Safety
/// `mu1_star` and `c_max` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entlab_optimize_collective(
    gamma: f64,
    kappa: f64,
    mu1_star: *mut f64,
    c_max: *mut f64,
) -> EntlabStatus {
    guard(|| write_optimum(Objective::Collective { gamma, kappa }, mu1_star, c_max))
}

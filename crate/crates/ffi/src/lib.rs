//! C interface.
//!
//! Every fallible function returns an [`FpStatus`]; on failure a
//! description is kept per thread and can be read with
//! [`fp_last_error_message`]. Handles are opaque and must be released with
//! the matching `*_free` function. Panics never cross the boundary; they are
//! reported as [`FpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use failprob::cli::ConfigOverlay;
use failprob::estimator::with_workers;
use failprob::{Error, EstimatorConfig, EstimatorResult, Method, Simulation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Parse = 3,
    Numerical = 4,
    TooManyDiscards = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpMethod {
    DirectMc = 0,
    ImportanceSampling = 1,
}

/// Decodes an [`FpMethod`] value passed as a plain integer.
fn method(code: u32) -> Result<Method, FpStatusError> {
    match code {
        c if c == FpMethod::DirectMc as u32 => Ok(Method::DirectMc),
        c if c == FpMethod::ImportanceSampling as u32 => Ok(Method::ImportanceSampling),
        _ => Err(FpStatusError(FpStatus::InvalidConfig, format!("unknown method code {code}"))),
    }
}

/// Summary of one estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FpEstimate {
    pub p_hat: f64,
    pub std: f64,
    pub rel_err: f64,
    pub n: u64,
    pub hits: u64,
    pub discarded: u64,
    pub wall_time_s: f64,
}

impl From<&EstimatorResult> for FpEstimate {
    fn from(r: &EstimatorResult) -> Self {
        FpEstimate {
            p_hat: r.p_hat,
            std: r.std,
            rel_err: r.rel_err,
            n: r.n,
            hits: r.hits,
            discarded: r.discarded,
            wall_time_s: r.wall_time_s,
        }
    }
}

/// Estimator configuration.
pub struct FpConfig(EstimatorConfig);

/// Factorized field and PDE problem for one configuration.
pub struct FpSimulation {
    config: EstimatorConfig,
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FpStatus {
    match e {
        Error::InvalidConfig { .. } | Error::InvalidGrid(_) | Error::Unsupported(_) | Error::NonSolvable { .. } => {
            FpStatus::InvalidConfig
        }
        Error::Parse(_) => FpStatus::Parse,
        Error::TooManyDiscards { .. } => FpStatus::TooManyDiscards,
        Error::Io(_) => FpStatus::Io,
        _ => FpStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), FpStatusError>) -> FpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpStatus::Ok,
        Ok(Err(FpStatusError(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            FpStatus::Panic
        }
    }
}

struct FpStatusError(FpStatus, String);

impl From<Error> for FpStatusError {
    fn from(e: Error) -> Self {
        FpStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> FpStatusError {
    FpStatusError(FpStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, FpStatusError> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, FpStatusError> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration for `dim` = 1 or 2.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_new(dim: u32, out: *mut *mut FpConfig) -> FpStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let config = ConfigOverlay { dim: Some(dim as usize), ..Default::default() }.resolve()?.estimator_config()?;
        *out = Box::into_raw(Box::new(FpConfig(config)));
        Ok(())
    })
}

/// Configuration from TOML text using the command-line configuration keys.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fp_config_from_toml(toml: *const c_char, out: *mut *mut FpConfig) -> FpStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        if toml.is_null() {
            return Err(null("toml"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| FpStatusError(FpStatus::Parse, "configuration is not valid UTF-8".into()))?;
        let config = ConfigOverlay::from_toml(text)?.resolve()?.estimator_config()?;
        *out = Box::into_raw(Box::new(FpConfig(config)));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from `fp_config_new`/`fp_config_from_toml`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fp_config_free(config: *mut FpConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Failure threshold `b`.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_set_threshold(config: *mut FpConfig, value: f64) -> FpStatus {
    guard(|| {
        let c = &mut deref_mut(config, "config")?.0;
        c.threshold = value;
        Ok(())
    })
}

/// Number of samples.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_set_samples(config: *mut FpConfig, value: u64) -> FpStatus {
    guard(|| {
        let c = &mut deref_mut(config, "config")?.0;
        c.samples = value;
        Ok(())
    })
}

/// Master seed.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_set_seed(config: *mut FpConfig, value: u64) -> FpStatus {
    guard(|| {
        let c = &mut deref_mut(config, "config")?.0;
        c.seed = value;
        Ok(())
    })
}

/// Estimator, one of the `FpMethod` values.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_set_method(config: *mut FpConfig, value: u32) -> FpStatus {
    guard(|| {
        let c = &mut deref_mut(config, "config")?.0;
        c.method = method(value)?;
        Ok(())
    })
}

/// Worker threads; 0 selects the default.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_set_workers(config: *mut FpConfig, value: u32) -> FpStatus {
    guard(|| {
        let c = &mut deref_mut(config, "config")?.0;
        c.workers = (value > 0).then_some(value as usize);
        Ok(())
    })
}

/// Checks the configuration without running anything.
///
/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn fp_config_validate(config: *const FpConfig) -> FpStatus {
    guard(|| Ok(deref(config, "config")?.0.validate()?))
}

/// Runs the configured estimator once.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fp_estimate(config: *const FpConfig, out: *mut FpEstimate) -> FpStatus {
    guard(|| {
        let config = deref(config, "config")?;
        let out = deref_mut(out, "out")?;
        *out = FpEstimate::from(&failprob::estimator::run(&config.0)?);
        Ok(())
    })
}

/// Factorizes the covariance and sets up the PDE problem once, for repeated
/// estimates at several thresholds.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fp_simulation_new(config: *const FpConfig, out: *mut *mut FpSimulation) -> FpStatus {
    guard(|| {
        let config = deref(config, "config")?.0.clone();
        let out = deref_mut(out, "out")?;
        config.validate()?;
        let sim = with_workers(config.workers, || Simulation::new(&config))?;
        *out = Box::into_raw(Box::new(FpSimulation { config, sim }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn fp_simulation_free(sim: *mut FpSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Number of grid nodes of the simulation, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn fp_simulation_nodes(sim: *const FpSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.sim.grid().len())
}

/// Estimates `P(sup |grad u| >= b)` with `n` samples, using the level and
/// proposal settings of the configuration the simulation was built from.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fp_simulation_estimate(
    sim: *const FpSimulation,
    method_code: u32,
    b: f64,
    n: u64,
    seed: u64,
    out: *mut FpEstimate,
) -> FpStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        let out = deref_mut(out, "out")?;
        let config =
            EstimatorConfig { threshold: b, samples: n, seed, method: method(method_code)?, ..s.config.clone() };
        config.validate()?;
        let r = with_workers(config.workers, || match config.method {
            Method::DirectMc => s.sim.run_direct_mc(b, n, seed),
            Method::ImportanceSampling => {
                s.sim.run_importance_sampling_for(b, &config.level, config.sigma_mode, n, seed)
            }
        })?;
        *out = FpEstimate::from(&r);
        Ok(())
    })
}

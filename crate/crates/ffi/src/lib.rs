//! C ABI over the `vre-atlas` pipeline.
//!
//! Run configurations and run results are exposed as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns a [`VaStatus`]; on failure a human-readable message is kept per
//! thread and can be fetched with [`va_last_error_message`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use vre_atlas::econ::{annuity_factor, lcoe, EconParams};
use vre_atlas::pipeline::{self, fixture, RunConfig, RunResults};
use vre_atlas::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Config = 4,
    Io = 5,
    Parse = 6,
    Data = 7,
    Numerical = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// Technology selector for [`va_lcoe`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaTechnology {
    Wind = 0,
    PvGround = 1,
    PvRoof = 2,
}

/// Per-scenario totals copied out of a result handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VaScenarioTotals {
    pub id: u8,
    pub wind_area_km2: f64,
    pub wind_twh: f64,
    pub wind_capacity_gw: f64,
    pub pv_ground_area_km2: f64,
    pub pv_ground_twh: f64,
    pub pv_roof_area_km2: f64,
    pub pv_roof_twh: f64,
}

/// Opaque run configuration.
pub struct VaConfig {
    inner: RunConfig,
}

/// Opaque run results.
pub struct VaResults {
    inner: RunResults,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> VaStatus {
    match err {
        Error::Config(_) => VaStatus::Config,
        Error::Io { .. } => VaStatus::Io,
        Error::Parse { .. } | Error::Csv(_) => VaStatus::Parse,
        Error::InvalidInput(_) | Error::InvalidRoughness(_) => VaStatus::InvalidInput,
        Error::UndefinedLcoe(_) | Error::Separation(_) | Error::Collinearity(_) => {
            VaStatus::Numerical
        }
        Error::Alignment(_) | Error::Data(_) | Error::LayerOverlap { .. } => VaStatus::Data,
    }
}

struct Failure(VaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, records any error or panic message, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VaStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".into());
            set_last_error(format!("internal panic: {msg}"));
            VaStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(VaStatus::NullPointer, "null pointer argument".into())
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null());
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(VaStatus::InvalidUtf8, "path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Message of the last failed call on this thread, or null when the last
/// call succeeded. The pointer stays valid until the next call into this
/// library from the same thread.
#[no_mangle]
pub extern "C" fn va_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn va_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a run configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn va_config_load(path: *const c_char, out: *mut *mut VaConfig) -> VaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let cfg = RunConfig::from_file(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(VaConfig { inner: cfg }));
        Ok(())
    })
}

/// Overrides the output directory of a loaded configuration.
///
/// # Safety
/// `config` must come from [`va_config_load`]; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_config_set_output_dir(
    config: *mut VaConfig,
    dir: *const c_char,
) -> VaStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(null)?;
        cfg.inner.output_dir = path_arg(dir)?;
        Ok(())
    })
}

/// Releases a configuration handle. Null is ignored.
///
/// # Safety
/// `config` must come from [`va_config_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn va_config_free(config: *mut VaConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs all configured scenarios and writes the outputs to the configured
/// output directory.
///
/// # Safety
/// `config` must come from [`va_config_load`] and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn va_run(config: *const VaConfig, out: *mut *mut VaResults) -> VaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let cfg = config.as_ref().ok_or_else(null)?;
        let results = pipeline::run(&cfg.inner)?;
        *out = Box::into_raw(Box::new(VaResults { inner: results }));
        Ok(())
    })
}

/// Number of scenarios in a result handle; 0 for null.
///
/// # Safety
/// `results` must be null or come from [`va_run`].
#[no_mangle]
pub unsafe extern "C" fn va_results_scenario_count(results: *const VaResults) -> usize {
    results.as_ref().map_or(0, |r| r.inner.totals.len())
}

/// Copies the totals of scenario `index` (in run order) into `out`.
///
/// # Safety
/// `results` must come from [`va_run`] and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn va_results_totals(
    results: *const VaResults,
    index: usize,
    out: *mut VaScenarioTotals,
) -> VaStatus {
    guard(|| {
        let r = results.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        let t = r.inner.totals.get(index).ok_or_else(|| {
            Failure(
                VaStatus::OutOfRange,
                format!(
                    "scenario index {index} out of range ({} scenarios)",
                    r.inner.totals.len()
                ),
            )
        })?;
        *out = VaScenarioTotals {
            id: t.id,
            wind_area_km2: t.wind_area_km2,
            wind_twh: t.wind_twh,
            wind_capacity_gw: t.wind_capacity_gw,
            pv_ground_area_km2: t.pv_ground_area_km2,
            pv_ground_twh: t.pv_ground_twh,
            pv_roof_area_km2: t.pv_roof_area_km2,
            pv_roof_twh: t.pv_roof_twh,
        };
        Ok(())
    })
}

/// Releases a result handle. Null is ignored.
///
/// # Safety
/// `results` must come from [`va_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn va_results_free(results: *mut VaResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// LCOE in £/kWh for the default cost parameters of `tech`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn va_lcoe(
    tech: VaTechnology,
    energy_kwh_per_kw: f64,
    out: *mut f64,
) -> VaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        let p = match tech {
            VaTechnology::Wind => EconParams::wind(),
            VaTechnology::PvGround => EconParams::ground_pv(),
            VaTechnology::PvRoof => EconParams::rooftop_pv(),
        };
        *out = lcoe(&p, energy_kwh_per_kw)?;
        Ok(())
    })
}

/// Present value of a unit annual payment over `lifetime_years`.
#[no_mangle]
pub extern "C" fn va_annuity_factor(interest: f64, lifetime_years: u32) -> f64 {
    annuity_factor(interest, lifetime_years)
}

/// Writes a synthetic study area and its `run.cfg` into `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn va_fixture_write(
    seed: u64,
    rows: usize,
    cols: usize,
    cell_size: f64,
    dir: *const c_char,
) -> VaStatus {
    guard(|| {
        let dir = path_arg(dir)?;
        if rows == 0 || cols == 0 || !(cell_size > 0.0) {
            return Err(Failure(
                VaStatus::InvalidInput,
                "fixture needs positive rows, cols and cell size".into(),
            ));
        }
        let fx = fixture::generate(&fixture::FixtureOptions {
            rows,
            cols,
            cell_size,
            seed,
            ..fixture::FixtureOptions::default()
        });
        fx.write(&dir)?;
        Ok(())
    })
}

use std::ffi::{CStr, CString};
use std::ptr;

use vre_atlas_ffi::*;

fn cstr(p: &std::path::Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = va_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn lcoe_and_annuity() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { va_lcoe(VaTechnology::PvGround, 982.0, &mut v) },
        VaStatus::Ok
    );
    assert!((v - 0.060).abs() < 5e-4);
    assert!(va_last_error_message().is_null());
    assert!((va_annuity_factor(0.08, 20) - 9.818147).abs() < 1e-5);

    assert_eq!(
        unsafe { va_lcoe(VaTechnology::Wind, 0.0, &mut v) },
        VaStatus::Numerical
    );
    assert!(last_error().contains("LCOE"));
    assert_eq!(
        unsafe { va_lcoe(VaTechnology::Wind, 1.0, ptr::null_mut()) },
        VaStatus::NullPointer
    );
}

#[test]
fn missing_config_reports_io() {
    let mut h = ptr::null_mut();
    let p = CString::new("/nonexistent/run.cfg").unwrap();
    assert_eq!(unsafe { va_config_load(p.as_ptr(), &mut h) }, VaStatus::Io);
    assert!(h.is_null());
    assert!(last_error().contains("/nonexistent/run.cfg"));
    assert_eq!(
        unsafe { va_config_load(ptr::null(), &mut h) },
        VaStatus::NullPointer
    );
}

#[test]
fn fixture_run_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    let d = cstr(dir.path());
    assert_eq!(
        unsafe { va_fixture_write(7, 60, 50, 1000.0, d.as_ptr()) },
        VaStatus::Ok
    );

    let cfg_path = cstr(&dir.path().join("run.cfg"));
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { va_config_load(cfg_path.as_ptr(), &mut cfg) },
        VaStatus::Ok
    );
    let out = cstr(&dir.path().join("ffi_out"));
    assert_eq!(
        unsafe { va_config_set_output_dir(cfg, out.as_ptr()) },
        VaStatus::Ok
    );

    let mut res = ptr::null_mut();
    assert_eq!(unsafe { va_run(cfg, &mut res) }, VaStatus::Ok);
    let n = unsafe { va_results_scenario_count(res) };
    assert_eq!(n, 8);
    let mut t = VaScenarioTotals::default();
    let mut prev = f64::INFINITY;
    for i in 0..4 {
        assert_eq!(unsafe { va_results_totals(res, i, &mut t) }, VaStatus::Ok);
        assert_eq!(usize::from(t.id), i + 1);
        assert!(t.wind_twh <= prev);
        prev = t.wind_twh;
    }
    assert_eq!(
        unsafe { va_results_totals(res, n, &mut t) },
        VaStatus::OutOfRange
    );
    assert!(dir.path().join("ffi_out/scenario_totals.csv").exists());

    unsafe {
        va_results_free(res);
        va_config_free(cfg);
        va_results_free(ptr::null_mut());
        va_config_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vre_atlas.h"))
        .unwrap();
    for name in [
        "va_config_load",
        "va_run",
        "va_results_free",
        "VA_STATUS_OK",
        "VaScenarioTotals",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(va_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

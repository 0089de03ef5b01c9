use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use rabi_sym_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rabi_last_error()) }.to_string_lossy().into_owned()
}

fn params(delta: f64, eps: f64, g: f64) -> *mut RabiParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_new(delta, eps, g, &mut p) }, RabiStatus::Ok);
    p
}

#[test]
fn solve_and_compare_with_closed_form() {
    let p = params(1.0, 0.0, 0.3);
    for n in 0..=3 {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(rabi_coeffs_solve(p, n, &mut a), RabiStatus::Ok);
            assert_eq!(rabi_coeffs_closed_form(p, n, &mut b), RabiStatus::Ok);
            let mut err = f64::NAN;
            assert_eq!(rabi_coeffs_max_relative_error(a, b, &mut err), RabiStatus::Ok);
            assert!(err <= 1e-10, "N = {n}: {err:e}");
            let mut lead = 0.0;
            assert_eq!(rabi_coeffs_get(a, RabiElement::B, 0, 2 * n, &mut lead), RabiStatus::Ok);
            assert_eq!(lead, 1.0);
            let mut got_n = 99;
            assert_eq!(rabi_coeffs_n_bias(a, &mut got_n), RabiStatus::Ok);
            assert_eq!(got_n, n);
            rabi_coeffs_free(a);
            rabi_coeffs_free(b);
        }
    }
    unsafe { rabi_params_free(p) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_new(1.0, 0.0, 0.5, &mut p) }, RabiStatus::InvalidParams);
    assert!(p.is_null());
    assert!(last_error().contains("invalid parameters"));

    let p = params(1.0, 0.0, 0.3);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { rabi_coeffs_closed_form(p, 4, &mut t) }, RabiStatus::UnsupportedBias);
    assert_eq!(unsafe { rabi_coeffs_solve(ptr::null(), 1, &mut t) }, RabiStatus::NullPointer);
    assert_eq!(unsafe { rabi_coeffs_solve(p, 1, ptr::null_mut()) }, RabiStatus::NullPointer);

    assert_eq!(unsafe { rabi_coeffs_solve(p, 1, &mut t) }, RabiStatus::Ok);
    assert_eq!(last_error(), "");
    let mut v = 0.0;
    assert_eq!(unsafe { rabi_coeffs_get(t, RabiElement::A, 1, 0, &mut v) }, RabiStatus::InvalidArgument);
    assert_eq!(unsafe { rabi_coeffs_get(t, RabiElement::A, 4, 0, &mut v) }, RabiStatus::InvalidArgument);
    let mut r = 0.0;
    assert_eq!(
        unsafe { rabi_coeffs_commutator_residual(t, RabiSector::Even, 5, &mut r) },
        RabiStatus::CutoffTooSmall
    );
    unsafe {
        rabi_coeffs_free(t);
        rabi_params_free(p);
        rabi_params_free(ptr::null_mut());
        rabi_string_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip() {
    let p = params(1.7, 0.0, 0.2);
    let mut t = ptr::null_mut();
    let mut s = ptr::null_mut();
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(rabi_coeffs_solve(p, 2, &mut t), RabiStatus::Ok);
        assert_eq!(rabi_coeffs_to_json(t, &mut s), RabiStatus::Ok);
        assert_eq!(rabi_coeffs_from_json(s, &mut back), RabiStatus::Ok);
        let mut err = 1.0;
        assert_eq!(rabi_coeffs_max_relative_error(back, t, &mut err), RabiStatus::Ok);
        assert_eq!(err, 0.0);
        let junk = CString::new("{").unwrap();
        let mut none = ptr::null_mut();
        assert_ne!(rabi_coeffs_from_json(junk.as_ptr(), &mut none), RabiStatus::Ok);
        rabi_string_free(s);
        rabi_coeffs_free(t);
        rabi_coeffs_free(back);
        rabi_params_free(p);
    }
}

#[test]
fn scan_through_handles() {
    let mut scan = ptr::null_mut();
    unsafe {
        assert_eq!(
            rabi_scan_new(2.0, 1.0, RabiSector::Even, 200, 6, 0.05, 0.45, 200, &mut scan),
            RabiStatus::Ok,
            "{}",
            last_error()
        );
        let (mut pts, mut lv) = (0, 0);
        assert_eq!(rabi_scan_shape(scan, &mut pts, &mut lv), RabiStatus::Ok);
        assert_eq!((pts, lv), (200, 6));
        let (mut g, mut e, mut par) = (0.0, 0.0, 0i8);
        assert_eq!(rabi_scan_level(scan, 0, 0, &mut g, &mut e, &mut par), RabiStatus::Ok);
        assert_eq!(g, 0.05);
        assert!(par == 1 || par == -1);
        assert_eq!(rabi_scan_level(scan, 200, 0, &mut g, &mut e, &mut par), RabiStatus::InvalidArgument);
        let mut n_true = 0;
        let mut json = ptr::null_mut();
        assert_eq!(rabi_scan_crossings(scan, &mut json, &mut n_true), RabiStatus::Ok);
        assert!(n_true >= 1);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"kind\": \"true\""));
        rabi_string_free(json);
        let mut csv = ptr::null_mut();
        assert_eq!(rabi_scan_to_csv(scan, &mut csv), RabiStatus::Ok);
        assert!(CStr::from_ptr(csv).to_str().unwrap().starts_with("g,level_index"));
        rabi_string_free(csv);
        rabi_scan_free(scan);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rabi_sym.h")).unwrap();
    for name in [
        "rabi_last_error",
        "rabi_string_free",
        "rabi_params_new",
        "rabi_coeffs_solve",
        "rabi_coeffs_commutator_residual",
        "rabi_scan_new",
        "rabi_scan_crossings",
        "typedef struct RabiScan RabiScan",
        "RABI_STATUS_NO_SOLUTION = 5",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Directory holding the library artifacts: `target/<profile>`.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("librabi_sym_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

//! The C ABI exercised from Rust, plus a C program built against the
//! generated header.

use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use zollcut_ffi::*;

fn last_error() -> String {
    let p = zc_last_error_message();
    assert!(!p.is_null());
    // SAFETY: non-null pointers from the library are NUL-terminated.
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn coherent(n: u32, w_re: f64, w_im: f64) -> *mut ZcState {
    let mut s = ptr::null_mut();
    // SAFETY: `s` is a valid out-pointer.
    assert_eq!(unsafe { zc_coherent_state_new(n, w_re, w_im, 1.0, &mut s) }, ZcStatus::Ok);
    s
}

fn coeffs(state: *const ZcState) -> (Vec<f64>, Vec<f64>) {
    let mut len = 0;
    // SAFETY: live handle and valid out-pointers throughout.
    unsafe {
        assert_eq!(zc_state_len(state, &mut len), ZcStatus::Ok);
        let (mut re, mut im) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(zc_state_coeffs(state, re.as_mut_ptr(), im.as_mut_ptr(), len), ZcStatus::Ok);
        (re, im)
    }
}

#[test]
fn coherent_state_matches_the_library() {
    let s = coherent(100, -0.25, -0.6);
    let (re, im) = coeffs(s);
    let scale = zollcut::SimulationScale::new(100).unwrap();
    let want = zollcut::coherent_state(num_complex::Complex64::new(-0.25, -0.6), scale, 100).unwrap();
    assert_eq!(re.len(), 101);
    for (k, c) in want.coeffs().iter().enumerate() {
        assert_eq!((re[k], im[k]), (c.re, c.im));
    }
    let mut norm = 0.0;
    // SAFETY: live handle, valid out-pointer; freed once.
    unsafe {
        assert_eq!(zc_state_norm(s, &mut norm), ZcStatus::Ok);
        zc_state_free(s);
    }
    assert_eq!(norm, want.norm());
}

#[test]
fn propagation_round_trips() {
    let s = coherent(60, 0.2, 0.3);
    let mut prop = ptr::null_mut();
    let (mut fwd, mut back) = (ptr::null_mut(), ptr::null_mut());
    let mut dim = 0;
    // SAFETY: all handles are live until freed at the end.
    unsafe {
        assert_eq!(zc_propagator_new_cut_q(60, 1.0, &mut prop), ZcStatus::Ok);
        assert_eq!(zc_propagator_dim(prop, &mut dim), ZcStatus::Ok);
        assert_eq!(dim, 61);
        assert_eq!(zc_propagator_apply(prop, s, 0.7, &mut fwd), ZcStatus::Ok);
        assert_eq!(zc_propagator_apply(prop, fwd, -0.7, &mut back), ZcStatus::Ok);
    }
    let ((r0, i0), (r1, i1)) = (coeffs(s), coeffs(back));
    let dist = r0
        .iter()
        .zip(&i0)
        .zip(r1.iter().zip(&i1))
        .map(|((a, b), (c, d))| (a - c).powi(2) + (b - d).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(dist <= 1e-8, "{dist}");
    // SAFETY: each handle freed exactly once.
    unsafe {
        zc_state_free(back);
        zc_state_free(fwd);
        zc_state_free(s);
        zc_propagator_free(prop);
    }
}

#[test]
fn husimi_fill_matches_the_library() {
    let (re, im) = (vec![0.3, -0.1, 0.2], vec![0.0, 0.4, -0.5]);
    let mut s = ptr::null_mut();
    let mut grid = vec![0.0; 12];
    // SAFETY: buffers hold the advertised lengths.
    unsafe {
        assert_eq!(zc_state_from_coeffs(7, re.as_ptr(), im.as_ptr(), 3, &mut s), ZcStatus::Ok);
        assert_eq!(zc_husimi_fill(s, 4, 3, -1.0, 1.0, -2.0, 2.0, grid.as_mut_ptr(), 12), ZcStatus::Ok);
        assert_eq!(
            zc_husimi_fill(s, 4, 4, -1.0, 1.0, -2.0, 2.0, grid.as_mut_ptr(), 12),
            ZcStatus::BufferTooSmall
        );
        zc_state_free(s);
    }
    let state = zollcut::BargmannState::new(
        zollcut::SimulationScale::new(7).unwrap(),
        re.iter().zip(&im).map(|(&a, &b)| num_complex::Complex64::new(a, b)).collect(),
    )
    .unwrap();
    let spec = zollcut::GridSpec { nx: 4, np: 3, xmin: -1.0, xmax: 1.0, pmin: -2.0, pmax: 2.0 };
    assert_eq!(grid, zollcut::husimi(&state, &spec).unwrap().values());
}

#[test]
fn szego_square_at_n100() {
    let mut r = ZcSzegoResult::default();
    // SAFETY: valid out-pointer.
    assert_eq!(unsafe { zc_szego_check(ZcFunction::Square as u32, 100, 1.0, &mut r) }, ZcStatus::Ok);
    assert!((r.lhs - 66.66).abs() < 1e-9);
    assert!((r.rhs - 200.0 / 3.0).abs() < 1e-9);
    assert!(r.pass);
    // SAFETY: valid out-pointer.
    assert_eq!(unsafe { zc_szego_check(9, 100, 1.0, &mut r) }, ZcStatus::InvalidArgument);
    assert!(last_error().contains("function code 9"));
}

#[test]
fn failures_report_status_and_message() {
    let mut s = ptr::null_mut();
    let mut out = 0.0;
    // SAFETY: null handles are rejected before any dereference.
    unsafe {
        assert_eq!(zc_state_norm(ptr::null(), &mut out), ZcStatus::NullPointer);
        assert!(last_error().contains("state is null"));
        assert_eq!(zc_coherent_state_new(0, 0.1, 0.1, 1.0, &mut s), ZcStatus::InvalidArgument);
        assert_eq!(zc_coherent_state_new(10, 0.1, 0.1, -1.0, &mut s), ZcStatus::InvalidArgument);
        assert_eq!(zc_coherent_state_new(10, f64::NAN, 0.1, 1.0, &mut s), ZcStatus::InvalidArgument);
        assert!(s.is_null());
        assert_eq!(zc_coherent_state_new(10, 0.1, 0.1, 1.0, ptr::null_mut()), ZcStatus::NullPointer);
        // far outside the disk every retained coefficient underflows
        assert_eq!(zc_coherent_state_new(1000, 30.0, 0.0, 1.0, &mut s), ZcStatus::Numerical);

        let small = coherent(10, 0.1, 0.1);
        let mut prop = ptr::null_mut();
        assert_eq!(zc_propagator_new_cut_q(20, 1.0, &mut prop), ZcStatus::Ok);
        let mut moved = ptr::null_mut();
        assert_eq!(zc_propagator_apply(prop, small, 1.0, &mut moved), ZcStatus::DimMismatch);
        assert!(last_error().contains("N=20"));
        zc_propagator_free(prop);
        zc_state_free(small);
        zc_state_free(ptr::null_mut());
        zc_propagator_free(ptr::null_mut());
    }
}

#[test]
fn version_is_the_crate_version() {
    // SAFETY: static NUL-terminated string.
    let v = unsafe { CStr::from_ptr(zc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    Some(exe.parent()?.parent()?.to_path_buf())
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include").join("zollcut.h");
    assert!(header.exists(), "build script did not write {}", header.display());
    let Some(lib_dir) = target_dir() else { return };
    let staticlib = lib_dir.join("libzollcut_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !staticlib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping C link check: no C compiler or static library");
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("propagate");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("examples").join("propagate.c"))
        .arg(&staticlib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    let norms: Vec<f64> = stdout
        .lines()
        .find_map(|l| l.strip_prefix("norm "))
        .unwrap()
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((norms[0] - norms[1]).abs() < 1e-10);
    assert!(stdout.contains("szego 66.66000 66.66667 1"), "{stdout}");
    assert!(stdout.contains("null state is null"), "{stdout}");
}

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use son_expm_ffi::*;

fn vector(n: usize, v: &[f64]) -> *mut SonVector {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { son_vector_new(n, v.as_ptr(), v.len(), &mut out) }, SonStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let len = unsafe { son_last_error_message(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(len.min(255));
    String::from_utf8(buf).unwrap()
}

#[test]
fn so2_rotation_round_trip() {
    let v = vector(2, &[PI / 2.0]);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { son_expm(v, SonMethod::Closed, -1.0, &mut r) }, SonStatus::Ok);
    assert_eq!(unsafe { son_rotation_dim(r) }, 2);
    assert_eq!(unsafe { son_rotation_method(r) }, SonMethod::Closed);
    let mut m = [0.0; 4];
    assert_eq!(unsafe { son_rotation_copy(r, m.as_mut_ptr(), 4) }, SonStatus::Ok);
    let expected = [0.0, 1.0, -1.0, 0.0];
    for (a, b) in m.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15, "{m:?}");
    }
    assert!(unsafe { son_rotation_orthogonality_residual(r) } < 1e-15);
    assert_eq!(unsafe { son_rotation_copy(r, m.as_mut_ptr(), 3) }, SonStatus::BufferTooSmall);
    unsafe {
        son_rotation_free(r);
        son_vector_free(v);
    }
}

#[test]
fn methods_agree_for_so9() {
    let coeffs: Vec<f64> = (0..36).map(|k| ((k * 7 % 11) as f64 - 5.0) * 0.13).collect();
    assert_eq!(son_algebra_dim(9), 36);
    let v = vector(9, &coeffs);
    let mut mats = Vec::new();
    for method in [SonMethod::Closed, SonMethod::Taylor, SonMethod::Companion] {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { son_expm(v, method, -1.0, &mut r) }, SonStatus::Ok);
        let mut m = vec![0.0; 81];
        assert_eq!(unsafe { son_rotation_copy(r, m.as_mut_ptr(), 81) }, SonStatus::Ok);
        unsafe { son_rotation_free(r) };
        mats.push(m);
    }
    for m in &mats[1..] {
        let d = m.iter().zip(&mats[0]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(d < 1e-11, "{d}");
    }
    unsafe { son_vector_free(v) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut out = ptr::null_mut();
    let v = [1.0, 2.0];
    assert_eq!(unsafe { son_vector_new(4, v.as_ptr(), 2, &mut out) }, SonStatus::Usage);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { son_vector_new(12, v.as_ptr(), 2, &mut out) }, SonStatus::Usage);
    assert_eq!(son_algebra_dim(12), 0);
    assert_eq!(unsafe { son_vector_new(2, ptr::null(), 1, &mut out) }, SonStatus::NullPointer);
    assert_eq!(last_error(), "v is null");
    assert_eq!(unsafe { son_vector_new(2, v.as_ptr(), 1, ptr::null_mut()) }, SonStatus::NullPointer);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { son_expm(ptr::null(), SonMethod::Closed, -1.0, &mut r) }, SonStatus::NullPointer);
    let nan = [f64::NAN];
    assert_eq!(unsafe { son_vector_new(2, nan.as_ptr(), 1, &mut out) }, SonStatus::Usage);
}

#[test]
fn non_g2_rotation_is_rejected_by_automorphism_check() {
    let v = vector(3, &[0.1, 0.2, 0.3]);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { son_expm(v, SonMethod::Closed, -1.0, &mut r) }, SonStatus::Ok);
    let mut x = 0.0;
    assert_ne!(unsafe { son_g2_automorphism_residual(r, &mut x) }, SonStatus::Ok);
    unsafe {
        son_rotation_free(r);
        son_vector_free(v);
    }
}

#[test]
fn invariants_and_angles() {
    let v = vector(6, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let mut inv = std::mem::MaybeUninit::<SonInvariants>::uninit();
    assert_eq!(unsafe { son_invariants(v, inv.as_mut_ptr()) }, SonStatus::Ok);
    let inv = unsafe { inv.assume_init() };
    assert_eq!(inv.n, 6);
    assert!((inv.v_norm - 2f64.sqrt()).abs() < 1e-15);
    assert!(inv.xi.is_finite() && inv.eta.is_finite());
    assert!(inv.zeta.is_nan() && inv.chi.is_nan() && inv.eta9.is_nan());
    assert!(inv.in_region);

    let mut phi = [0.0; 3];
    let mut count = 0;
    assert_eq!(unsafe { son_torus_angles(v, phi.as_mut_ptr(), 3, &mut count) }, SonStatus::Ok);
    assert_eq!(count, 3);
    assert_eq!(unsafe { son_torus_angles(v, phi.as_mut_ptr(), 2, &mut count) }, SonStatus::BufferTooSmall);
    assert_eq!(count, 3);
    unsafe { son_vector_free(v) };
}

#[test]
fn g2_exponential_is_an_automorphism() {
    let w: Vec<f64> = (0..14).map(|k| (k as f64 * 0.37).sin()).collect();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { son_expm_g2(w.as_ptr(), 14, &mut r) }, SonStatus::Ok);
    assert_eq!(unsafe { son_rotation_dim(r) }, 7);
    let mut x = f64::NAN;
    assert_eq!(unsafe { son_g2_automorphism_residual(r, &mut x) }, SonStatus::Ok);
    assert!(x < 1e-10, "{x}");
    unsafe { son_rotation_free(r) };

    let mut a = [0.0; 21];
    assert_eq!(unsafe { son_embed_g2(w.as_ptr(), 14, a.as_mut_ptr(), 21) }, SonStatus::Ok);
    let v = vector(7, &a);
    assert_eq!(unsafe { son_g2_constraint_residual(v, &mut x) }, SonStatus::Ok);
    assert!(x < 1e-12, "{x}");
    unsafe { son_vector_free(v) };
    assert_eq!(unsafe { son_expm_g2(w.as_ptr(), 13, &mut r) }, SonStatus::Usage);
}

#[test]
fn free_accepts_null() {
    unsafe {
        son_vector_free(ptr::null_mut());
        son_rotation_free(ptr::null_mut());
    }
    assert_eq!(unsafe { son_rotation_dim(ptr::null()) }, 0);
    assert!(unsafe { son_rotation_orthogonality_residual(ptr::null()) }.is_nan());
}

/// Compiles the C smoke program against the generated header and the static
/// library when a C compiler is available.
#[test]
fn c_smoke_program() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libson_expm_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("son_expm_smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

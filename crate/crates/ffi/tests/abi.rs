use std::ffi::CStr;
use std::path::PathBuf;
use std::ptr;
use tfdiff_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 512];
    unsafe {
        tfdiff_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn kernel_handles_round_trip() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(tfdiff_kernel_rl(0.5, 1e-3, 1000, &mut k), TfdiffStatus::Ok);
        assert_eq!(tfdiff_kernel_len(k), 1000);
        let mut w = vec![0.0; 1000];
        assert_eq!(tfdiff_kernel_weights(k, w.as_mut_ptr(), w.len()), TfdiffStatus::Ok);
        assert!(w.windows(2).all(|p| p[1] <= p[0]));
        let mut ell = ptr::null_mut();
        assert_eq!(tfdiff_kernel_complement(k, &mut ell), TfdiffStatus::Ok);
        let mut r = f64::NAN;
        assert_eq!(tfdiff_kernel_sonine_residual(k, ell, &mut r), TfdiffStatus::Ok);
        assert!(r <= 1e-10, "{r}");
        let mut short = vec![0.0; 10];
        assert_eq!(
            tfdiff_kernel_weights(k, short.as_mut_ptr(), short.len()),
            TfdiffStatus::BufferTooSmall
        );
        assert!(last_error().contains("1000"));
        tfdiff_kernel_free(ell);
        tfdiff_kernel_free(k);
        tfdiff_kernel_free(ptr::null_mut());
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(tfdiff_kernel_rl(1.5, 1e-3, 10, &mut k), TfdiffStatus::Domain);
        assert!(k.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            tfdiff_kernel_rl(0.5, 1e-3, 10, ptr::null_mut()),
            TfdiffStatus::NullPointer
        );
        assert_eq!(tfdiff_kernel_len(ptr::null()), 0);
        let zero = [0.0, 0.0];
        assert_eq!(
            tfdiff_kernel_from_weights(0.1, zero.as_ptr(), 2, &mut k),
            TfdiffStatus::Ok
        );
        let mut ell = ptr::null_mut();
        assert_eq!(
            tfdiff_kernel_complement(k, &mut ell),
            TfdiffStatus::SingularDeconvolution
        );
        tfdiff_kernel_free(k);
        let rising = [0.1, 0.2];
        assert_eq!(
            tfdiff_kernel_from_weights(0.1, rising.as_ptr(), 2, &mut k),
            TfdiffStatus::InvalidWeights
        );
        let needed = tfdiff_last_error_message(ptr::null_mut(), 0);
        assert_eq!(needed, last_error().len() + 1);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut e = 0.0;
        assert_eq!(tfdiff_mittag_leffler(0.5, -1.0, &mut e), TfdiffStatus::Ok);
        assert!((e - 0.427_583_576_155_807).abs() < 1e-12);
        let mut v = vec![0.0; 100];
        assert_eq!(
            tfdiff_ode_solve(0.5, 1.0, 1.0, 1.0, 1e-2, 100, v.as_mut_ptr(), v.len()),
            TfdiffStatus::Ok
        );
        assert!(v.windows(2).all(|p| p[1] <= p[0] && p[1] > 0.0));
        assert!((v[99] - e).abs() < 1e-2);
        assert_eq!(
            tfdiff_ode_solve(0.5, 1.0, 1.0, 1.0, 1e-2, 100, v.as_mut_ptr(), 50),
            TfdiffStatus::BufferTooSmall
        );
    }
}

#[test]
fn one_dimensional_solve() {
    let h = std::f64::consts::PI / 50.0;
    let u0: Vec<f64> = (1..50).map(|i| (i as f64 * h).sin()).collect();
    unsafe {
        let mut hist = ptr::null_mut();
        let s = tfdiff_solve_1d(
            0.5,
            1.0,
            0,
            0.0,
            std::f64::consts::PI,
            h,
            1e-2,
            50,
            u0.as_ptr(),
            u0.len(),
            &mut hist,
        );
        assert_eq!(s, TfdiffStatus::Ok, "{}", last_error());
        assert_eq!(tfdiff_history_states(hist), 51);
        assert_eq!(tfdiff_history_nodes(hist), 49);
        let mut u = vec![0.0; 49];
        assert_eq!(
            tfdiff_history_state(hist, 50, u.as_mut_ptr(), u.len()),
            TfdiffStatus::Ok
        );
        let mut e = 0.0;
        tfdiff_mittag_leffler(0.5, -(0.5f64).sqrt(), &mut e);
        assert!((u[24] - e).abs() < 2e-2, "{} vs {e}", u[24]);
        assert_eq!(
            tfdiff_history_state(hist, 51, u.as_mut_ptr(), u.len()),
            TfdiffStatus::Domain
        );
        tfdiff_history_free(hist);

        let bad = tfdiff_solve_1d(0.5, 0.5, 0, 0.0, 1.0, 0.1, 1e-2, 5, u0.as_ptr(), 9, &mut hist);
        assert_eq!(bad, TfdiffStatus::Domain, "{}", last_error());
        let wrong_len = tfdiff_solve_1d(0.5, 1.0, 0, 0.0, 1.0, 0.1, 1e-2, 5, u0.as_ptr(), 3, &mut hist);
        assert_eq!(wrong_len, TfdiffStatus::Shape);
    }
}

#[test]
fn header_is_generated() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/tfdiff.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in [
        "tfdiff_kernel_rl",
        "tfdiff_solve_1d",
        "tfdiff_history_free",
        "TFDIFF_STATUS_OK",
        "typedef struct TfdiffKernel",
    ] {
        assert!(text.contains(sym), "missing {sym}");
    }
}

// Compiles tests/c/smoke.c against the header and static library when a
// C compiler and the archive are present.
#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libtfdiff_ffi.a");
    if !archive.exists() {
        eprintln!("skipping: {} not built", archive.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("tfdiff_smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&archive)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status();
    let Ok(status) = status else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(status.success(), "C compile failed");
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hamloop_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hamloop_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn rho_of_rotation() {
    let th: f64 = 1.1;
    let m = [th.cos(), -th.sin(), th.sin(), th.cos()];
    let (mut re, mut im) = (0.0, 0.0);
    let s = unsafe { hamloop_rho(m.as_ptr(), 2, &mut re, &mut im) };
    assert_eq!(s, HamloopStatus::Ok);
    assert!((re - th.cos()).abs() < 1e-12 && (im - th.sin()).abs() < 1e-12);
    assert_eq!(last_error(), "");
}

#[test]
fn rho_rejects_bad_input() {
    let m = [2.0, 0.0, 0.0, 2.0];
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { hamloop_rho(m.as_ptr(), 2, &mut re, &mut im) },
        HamloopStatus::NonSymplectic
    );
    assert!(last_error().contains("symplectic"));
    assert_eq!(
        unsafe { hamloop_rho(m.as_ptr(), 1, &mut re, &mut im) },
        HamloopStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { hamloop_rho(ptr::null(), 2, &mut re, &mut im) },
        HamloopStatus::NullPointer
    );
}

#[test]
fn winding_of_sampled_circle() {
    let n = 64;
    let (re, im): (Vec<f64>, Vec<f64>) = (0..=n)
        .map(|i| {
            let a = -2.0 * std::f64::consts::TAU * i as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .unzip();
    let mut w = 0;
    assert_eq!(
        unsafe { hamloop_winding(re.as_ptr(), im.as_ptr(), re.len(), &mut w) },
        HamloopStatus::Ok
    );
    assert_eq!(w, -2);
    let open = [1.0, 0.0];
    let open_im = [0.0, 1.0];
    assert_ne!(
        unsafe { hamloop_winding(open.as_ptr(), open_im.as_ptr(), 2, &mut w) },
        HamloopStatus::Ok
    );
}

#[test]
fn closed_forms() {
    let cases = [
        (1, "3", "1", (8, 15), (-4, 15)),
        (2, "5", "1", (7, 6), (-7, 6)),
    ];
    for (k, tau, mu, a, b) in cases {
        let (tau, mu) = (CString::new(tau).unwrap(), CString::new(mu).unwrap());
        let mut x = HamloopRational { num: 0, den: 0 };
        let mut y = x;
        let s =
            unsafe { hamloop_hirzebruch_closed_form(k, tau.as_ptr(), mu.as_ptr(), &mut x, &mut y) };
        assert_eq!(s, HamloopStatus::Ok);
        assert_eq!((x.num, x.den), a);
        assert_eq!((y.num, y.den), b);
    }
    let mut x = HamloopRational { num: 0, den: 0 };
    let mut y = x;
    let mu = CString::new("1").unwrap();
    let s = unsafe { hamloop_hirzebruch_closed_form(1, ptr::null(), mu.as_ptr(), &mut x, &mut y) };
    assert_eq!(s, HamloopStatus::NullPointer);
}

#[test]
fn scenario_handles() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { hamloop_scenario_torus(1, 7, &mut s) },
        HamloopStatus::Ok
    );
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { hamloop_scenario_run(s, &mut r) },
        HamloopStatus::Ok
    );
    assert!(unsafe { hamloop_report_passed(r) });
    let count = unsafe { hamloop_report_check_count(r) };
    assert!(count >= 2);
    let mut c = HamloopCheck {
        name: ptr::null(),
        expected: 0.0,
        actual: 0.0,
        tolerance: 0.0,
        relative: false,
        passed: false,
    };
    assert_eq!(
        unsafe { hamloop_report_check(r, 0, &mut c) },
        HamloopStatus::Ok
    );
    assert_eq!(unsafe { CStr::from_ptr(c.name) }.to_str().unwrap(), "J");
    assert_eq!(
        unsafe { hamloop_report_check(r, count, &mut c) },
        HamloopStatus::InvalidArgument
    );
    let json = unsafe { CStr::from_ptr(hamloop_report_json(r)) }
        .to_str()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["scenario"], "torus");
    unsafe {
        hamloop_report_free(r);
        hamloop_scenario_free(s);
        hamloop_report_free(ptr::null_mut());
        hamloop_scenario_free(ptr::null_mut());
    }
    assert!(unsafe { hamloop_report_json(ptr::null()) }.is_null());
    assert_eq!(unsafe { hamloop_report_check_count(ptr::null()) }, 0);
}

#[test]
fn invalid_scenarios() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { hamloop_scenario_torus(7, 1, &mut s) },
        HamloopStatus::InvalidArgument
    );
    assert!(s.is_null());
    assert_eq!(
        unsafe { hamloop_scenario_sphere(3.0, &mut s) },
        HamloopStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { hamloop_scenario_sphere(0.3, ptr::null_mut()) },
        HamloopStatus::NullPointer
    );
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include").join("hamloop.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "hamloop_rho",
        "hamloop_scenario_run",
        "hamloop_report_free",
        "HAMLOOP_STATUS_PANIC",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let lib = target_dir().join("libhamloop_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let bin = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hamloop_c_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("checks"));
}

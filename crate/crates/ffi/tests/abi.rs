use std::ffi::{CStr, CString};
use std::ptr;

use dirac21_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { d21_last_error(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(d21_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn gamma_rep_roundtrip() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(d21_gamma_rep_new(-1, &mut rep), D21Status::Ok);
        let mut g1 = [D21Complex::default(); 4];
        assert_eq!(d21_gamma_matrix(rep, 1, g1.as_mut_ptr()), D21Status::Ok);
        // i s σ₁ with s = −1
        assert_eq!(g1[1], D21Complex { re: 0.0, im: -1.0 });
        assert_eq!(g1[0], D21Complex::default());
        let mut res = 1.0;
        assert_eq!(d21_gamma_rep_clifford_residual(rep, &mut res), D21Status::Ok);
        assert!(res < 1e-14);
        assert_eq!(d21_gamma_matrix(rep, 3, g1.as_mut_ptr()), D21Status::Domain);
        assert!(last_error().contains("out of range"));
        d21_gamma_rep_free(rep);
    }
}

#[test]
fn bad_sign_and_null_pointers() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_ne!(d21_gamma_rep_new(2, &mut rep), D21Status::Ok);
        assert!(rep.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(d21_gamma_rep_new(1, ptr::null_mut()), D21Status::NullPointer);
        let mut r = 0.0;
        assert_eq!(d21_gamma_rep_clifford_residual(ptr::null(), &mut r), D21Status::NullPointer);
        d21_gamma_rep_free(ptr::null_mut());
    }
}

#[test]
fn polar_chart() {
    unsafe {
        let id = CString::new("polar").unwrap();
        let mut chart = ptr::null_mut();
        assert_eq!(d21_chart_new(id.as_ptr(), 0.0, &mut chart), D21Status::Ok);
        let u = [0.3, 1.5, 0.4];
        let mut g = [0.0; 9];
        assert_eq!(d21_chart_metric(chart, u.as_ptr(), g.as_mut_ptr()), D21Status::Ok);
        assert!((g[8] + 1.5 * 1.5).abs() < 1e-14);
        let mut c = [0.0; 27];
        assert_eq!(d21_chart_christoffel(chart, u.as_ptr(), c.as_mut_ptr()), D21Status::Ok);
        assert!((c[9 + 3 * 2 + 2] + 1.5).abs() < 1e-14);
        assert!((c[18 + 3 + 2] - 1.0 / 1.5).abs() < 1e-14);
        let mut x = [0.0; 3];
        let mut back = [0.0; 3];
        assert_eq!(d21_chart_to_cartesian(chart, u.as_ptr(), x.as_mut_ptr()), D21Status::Ok);
        assert_eq!(d21_chart_to_chart(chart, x.as_ptr(), back.as_mut_ptr()), D21Status::Ok);
        for k in 0..3 {
            assert!((back[k] - u[k]).abs() < 1e-12);
        }
        let bad = [0.0, -1.0, 0.0];
        assert_eq!(d21_chart_metric(chart, bad.as_ptr(), g.as_mut_ptr()), D21Status::Domain);
        d21_chart_free(chart);
    }
}

#[test]
fn unknown_chart_and_small_a() {
    unsafe {
        let mut chart = ptr::null_mut();
        let id = CString::new("spherical").unwrap();
        assert_ne!(d21_chart_new(id.as_ptr(), 0.0, &mut chart), D21Status::Ok);
        let id = CString::new("null_parabolic").unwrap();
        assert_eq!(d21_chart_new(id.as_ptr(), 1e-6, &mut chart), D21Status::Domain);
        assert!(chart.is_null());
        let bytes = [0xffu8, 0];
        assert_eq!(d21_chart_new(bytes.as_ptr() as *const _, 1.0, &mut chart), D21Status::InvalidUtf8);
    }
}

#[test]
fn solve_coulomb() {
    unsafe {
        let cfg = CString::new("[run]\nset = 3\ns = 1\n[potential]\nA0 = -1:0.5\n").unwrap();
        let mut sol = ptr::null_mut();
        assert_eq!(d21_solve(cfg.as_ptr(), &mut sol), D21Status::Ok, "{}", last_error());
        let mut r = 1.0;
        assert_eq!(d21_solution_residual(sol, &mut r), D21Status::Ok);
        assert!(r < 1e-5);
        let mut e = [1.0; 2];
        assert_eq!(d21_solution_eigen_residuals(sol, e.as_mut_ptr()), D21Status::Ok);
        assert!(e[0] < 1e-6 && e[1] < 1e-6);
        let mut pass = 0;
        assert_eq!(d21_solution_pass(sol, &mut pass), D21Status::Ok);
        assert_eq!(pass, 1);

        let x = [0.1, 1.2, 0.9];
        let mut phi = [D21Complex::default(); 2];
        assert_eq!(d21_solution_eval(sol, x.as_ptr(), phi.as_mut_ptr()), D21Status::Ok);
        assert!(phi[0].re.hypot(phi[0].im) + phi[1].re.hypot(phi[1].im) > 0.0);

        let mut psi = [D21Complex::default(); 2];
        assert_eq!(d21_solution_reduced(sol, 2.0, psi.as_mut_ptr()), D21Status::Ok);
        assert_eq!(d21_solution_reduced(sol, 50.0, psi.as_mut_ptr()), D21Status::OutsideRange);

        let mut csv = ptr::null_mut();
        assert_eq!(d21_solution_trajectory_csv(sol, &mut csv), D21Status::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        d21_string_free(csv);
        assert!(text.starts_with("t,re_psi1,im_psi1,re_psi2,im_psi2\n"));
        assert!(text.lines().count() > 3);
        d21_solution_free(sol);
    }
}

#[test]
fn solve_reports_config_errors() {
    unsafe {
        let mut sol = ptr::null_mut();
        let cfg = CString::new("[run]\nset = 6\n").unwrap();
        assert_eq!(d21_solve(cfg.as_ptr(), &mut sol), D21Status::Config);
        assert!(last_error().contains("set 6"));
        let cfg = CString::new("[run]\nm = 0\n").unwrap();
        assert_eq!(d21_solve(cfg.as_ptr(), &mut sol), D21Status::Config);
        assert!(sol.is_null());
        // success clears the previous message
        let mut rep = ptr::null_mut();
        assert_eq!(d21_gamma_rep_new(1, &mut rep), D21Status::Ok);
        assert_eq!(last_error(), "");
        d21_gamma_rep_free(rep);
    }
}

#[test]
fn error_message_truncates() {
    unsafe {
        let cfg = CString::new("[nosuch]\n").unwrap();
        let mut sol = ptr::null_mut();
        assert_eq!(d21_solve(cfg.as_ptr(), &mut sol), D21Status::Config);
        let mut buf = [1 as std::ffi::c_char; 8];
        let n = d21_last_error(buf.as_mut_ptr(), buf.len());
        assert!(n > 7);
        assert_eq!(buf[7], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dirac21.h")).unwrap();
    for name in [
        "d21_version",
        "d21_last_error",
        "d21_gamma_rep_new",
        "d21_gamma_rep_free",
        "d21_gamma_matrix",
        "d21_gamma_rep_clifford_residual",
        "d21_chart_new",
        "d21_chart_free",
        "d21_chart_metric",
        "d21_chart_christoffel",
        "d21_chart_to_cartesian",
        "d21_chart_to_chart",
        "d21_solve",
        "d21_solution_free",
        "d21_solution_residual",
        "d21_solution_eigen_residuals",
        "d21_solution_pass",
        "d21_solution_eval",
        "d21_solution_reduced",
        "d21_solution_trajectory_csv",
        "d21_string_free",
        "D21_STATUS_OK = 0",
        "typedef struct D21Solution D21Solution",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

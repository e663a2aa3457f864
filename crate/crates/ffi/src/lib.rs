//! C ABI for `dirac21`.
//!
//! Objects are exposed as opaque handles created by `*_new` functions and
//! released by the matching `*_free`. Every fallible function returns a
//! [`D21Status`]; on failure the message is kept per thread and can be read
//! with [`d21_last_error`].

#![allow(clippy::needless_range_loop)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dirac21::clifford::{make_gamma_rep, GammaRep, Mat2C};
use dirac21::config::RunConfig;
use dirac21::geometry::{self, Chart};
use dirac21::pipeline::{self, SeparationRun};
use dirac21::Error;

/// Status codes. `D21_STATUS_OK` is zero; every other value is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D21Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Inconsistent = 4,
    SingularFrame = 5,
    NotAntisymmetric = 6,
    InadmissiblePotential = 7,
    SingularInterval = 8,
    StepUnderflow = 9,
    OutsideRange = 10,
    Config = 11,
    Io = 12,
    Panic = 13,
}

impl From<&Error> for D21Status {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => D21Status::Domain,
            Error::Inconsistent(_) => D21Status::Inconsistent,
            Error::SingularFrame(_) => D21Status::SingularFrame,
            Error::NotAntisymmetric(_) => D21Status::NotAntisymmetric,
            Error::InadmissiblePotential(_) => D21Status::InadmissiblePotential,
            Error::SingularInterval(_) => D21Status::SingularInterval,
            Error::StepUnderflow(_) => D21Status::StepUnderflow,
            Error::OutsideRange { .. } => D21Status::OutsideRange,
            Error::Config(_) => D21Status::Config,
            Error::Io(_) => D21Status::Io,
        }
    }
}

/// Complex number with the layout of C `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct D21Complex {
    pub re: f64,
    pub im: f64,
}

/// Opaque gamma-matrix representation.
pub struct D21GammaRep(GammaRep);

/// Opaque chart of flat (2+1) spacetime.
pub struct D21Chart(Chart);

/// Opaque result of a separation run: trajectory, reconstructed field and
/// residual report.
pub struct D21Solution {
    run: SeparationRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Status(D21Status, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Status(D21Status::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(D21Status::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> D21Status {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => D21Status::Ok,
        Ok(Err(Failure::Status(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            D21Status::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(D21Status::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn vec3_arg(p: *const f64, what: &str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn write_mat(m: &Mat2C, out: *mut D21Complex) {
    for (k, v) in [m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1]].iter().enumerate() {
        *out.add(k) = D21Complex { re: v.re, im: v.im };
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn d21_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn d21_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates the representation for s = +1 or −1.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn d21_gamma_rep_new(s: i32, out: *mut *mut D21GammaRep) -> D21Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rep = make_gamma_rep(s)?;
        *out = Box::into_raw(Box::new(D21GammaRep(rep)));
        Ok(())
    })
}

/// # Safety
/// `rep` must be null or a handle from [`d21_gamma_rep_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn d21_gamma_rep_free(rep: *mut D21GammaRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Writes γ̂^index (index 0..2) row-major into `out[4]`.
///
/// # Safety
/// `rep` must be a live handle and `out` must point to 4 writable values.
#[no_mangle]
pub unsafe extern "C" fn d21_gamma_matrix(rep: *const D21GammaRep, index: u32, out: *mut D21Complex) -> D21Status {
    guard(|| {
        let rep = rep.as_ref().ok_or_else(|| null("rep"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if index > 2 {
            return Err(Error::Domain(format!("gamma index {index} out of range 0..2")).into());
        }
        write_mat(&rep.0.g[index as usize], out);
        Ok(())
    })
}

/// Largest deviation of the anticommutators from 2η^{ab}I.
///
/// # Safety
/// `rep` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d21_gamma_rep_clifford_residual(rep: *const D21GammaRep, out: *mut f64) -> D21Status {
    guard(|| {
        let rep = rep.as_ref().ok_or_else(|| null("rep"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = rep.0.clifford_residual();
        Ok(())
    })
}

/// Creates a chart by id: cartesian, polar, rindler_t, rindler_x, null_plane,
/// null_parabolic (uses `a`), null_projective.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_new(id: *const c_char, a: f64, out: *mut *mut D21Chart) -> D21Status {
    guard(|| {
        let id = str_arg(id, "id")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let chart = Chart::from_id(id, a)?;
        *out = Box::into_raw(Box::new(D21Chart(chart)));
        Ok(())
    })
}

/// # Safety
/// `chart` must be null or a handle from [`d21_chart_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_free(chart: *mut D21Chart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Metric g_{μν} at chart point `u[3]`, row-major into `out[9]`.
///
/// # Safety
/// `chart` must be a live handle, `u` readable for 3 values, `out` writable for 9.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_metric(chart: *const D21Chart, u: *const f64, out: *mut f64) -> D21Status {
    guard(|| {
        let chart = &chart.as_ref().ok_or_else(|| null("chart"))?.0;
        let u = vec3_arg(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        chart.check(&u)?;
        let g = chart.metric(&u);
        for i in 0..3 {
            for j in 0..3 {
                *out.add(3 * i + j) = g[i][j];
            }
        }
        Ok(())
    })
}

/// Christoffel symbols Γ^μ_{να} at `u[3]` into `out[27]`, index 9μ + 3ν + α.
///
/// # Safety
/// `chart` must be a live handle, `u` readable for 3 values, `out` writable for 27.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_christoffel(chart: *const D21Chart, u: *const f64, out: *mut f64) -> D21Status {
    guard(|| {
        let chart = &chart.as_ref().ok_or_else(|| null("chart"))?.0;
        let u = vec3_arg(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = geometry::christoffel(chart, &u)?;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    *out.add(9 * i + 3 * j + k) = g[i][j][k];
                }
            }
        }
        Ok(())
    })
}

/// Cartesian point of chart point `u[3]` into `out[3]`.
///
/// # Safety
/// `chart` must be a live handle, `u` readable and `out` writable for 3 values.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_to_cartesian(chart: *const D21Chart, u: *const f64, out: *mut f64) -> D21Status {
    guard(|| {
        let chart = &chart.as_ref().ok_or_else(|| null("chart"))?.0;
        let u = vec3_arg(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        chart.check(&u)?;
        let x = chart.to_cartesian(&u);
        ptr::copy_nonoverlapping(x.as_ptr(), out, 3);
        Ok(())
    })
}

/// Chart point of Cartesian point `x[3]` into `out[3]`.
///
/// # Safety
/// `chart` must be a live handle, `x` readable and `out` writable for 3 values.
#[no_mangle]
pub unsafe extern "C" fn d21_chart_to_chart(chart: *const D21Chart, x: *const f64, out: *mut f64) -> D21Status {
    guard(|| {
        let chart = &chart.as_ref().ok_or_else(|| null("chart"))?.0;
        let x = vec3_arg(x, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let u = chart.to_chart(&x)?;
        ptr::copy_nonoverlapping(u.as_ptr(), out, 3);
        Ok(())
    })
}

/// Runs the separation pipeline for a configuration given as text in the
/// CLI config format (an empty string selects the defaults). No files are
/// written.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn d21_solve(config: *const c_char, out: *mut *mut D21Solution) -> D21Status {
    guard(|| {
        let text = str_arg(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig::parse(text, None)?;
        let run = pipeline::separate(&cfg)?;
        *out = Box::into_raw(Box::new(D21Solution { run }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from [`d21_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_free(sol: *mut D21Solution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Relative Dirac residual max|Hφ|/max|φ| over the verification grid.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_residual(sol: *const D21Solution, out: *mut f64) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sol.run.residual.relative_max;
        Ok(())
    })
}

/// Eigen-relation residuals of both operators into `out[2]`.
///
/// # Safety
/// `sol` must be a live handle and `out` writable for 2 values.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_eigen_residuals(sol: *const D21Solution, out: *mut f64) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(sol.run.eigen.as_ptr(), out, 2);
        Ok(())
    })
}

/// 1 when every verification passed, 0 otherwise.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_pass(sol: *const D21Solution, out: *mut i32) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sol.run.pass() as i32;
        Ok(())
    })
}

/// Cartesian spinor φ_C at `x[3]` into `out[2]`.
///
/// # Safety
/// `sol` must be a live handle, `x` readable for 3 values, `out` writable for 2.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_eval(sol: *const D21Solution, x: *const f64, out: *mut D21Complex) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let x = vec3_arg(x, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = sol.run.field.eval(&x)?;
        for k in 0..2 {
            *out.add(k) = D21Complex { re: v.0[k].re, im: v.0[k].im };
        }
        Ok(())
    })
}

/// Reduced solution ψ̃(t) into `out[2]` (dense output).
///
/// # Safety
/// `sol` must be a live handle and `out` writable for 2 values.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_reduced(sol: *const D21Solution, t: f64, out: *mut D21Complex) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = sol.run.trajectory.eval(t)?;
        for k in 0..2 {
            *out.add(k) = D21Complex { re: v.0[k].re, im: v.0[k].im };
        }
        Ok(())
    })
}

/// Trajectory CSV (t, Re ψ̃₁, Im ψ̃₁, Re ψ̃₂, Im ψ̃₂) as a newly allocated
/// string; release it with [`d21_string_free`].
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn d21_solution_trajectory_csv(sol: *const D21Solution, out: *mut *mut c_char) -> D21Status {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(sol.run.trajectory.to_csv()).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn d21_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C ABI for the hamloop library.
//!
//! Every function returns a [`HamloopStatus`]; on failure the message is
//! available from [`hamloop_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hamloop::geom::QuadratureSpec;
use hamloop::nalgebra::DMatrix;
use hamloop::num_complex::Complex64;
use hamloop::scenarios::{HirzebruchScenario, ScenarioOutcome, SphereScenario, TorusScenario};
use hamloop::symp::{rho, winding_number, PhasePath, SymplecticMatrix};
use hamloop::toric::{closed_form_invariants, DelzantTrapezoid, ExactValue};
use hamloop::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamloopStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonSymplectic = 3,
    NumericalFailure = 4,
    Overflow = 5,
    Panic = 6,
}

/// Exact rational with machine-word numerator and denominator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HamloopRational {
    pub num: i64,
    pub den: i64,
}

/// One comparison of a scenario run. `name` is owned by the report.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HamloopCheck {
    pub name: *const c_char,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub passed: bool,
}

enum Kind {
    Sphere(SphereScenario),
    Torus(TorusScenario),
    Hirzebruch(HirzebruchScenario),
}

/// A configured scenario.
pub struct HamloopScenario {
    kind: Kind,
}

/// The result of running a scenario.
pub struct HamloopReport {
    outcome: ScenarioOutcome,
    json: CString,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(HamloopStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter(_) | Error::InvalidTrapezoid(_) => {
                HamloopStatus::InvalidArgument
            }
            Error::NonSymplectic { .. } | Error::NonSymplecticJacobian { .. } => {
                HamloopStatus::NonSymplectic
            }
            _ => HamloopStatus::NumericalFailure,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HamloopStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F>(f: F) -> HamloopStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HamloopStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            HamloopStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            HamloopStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

fn rational(v: &ExactValue) -> Result<HamloopRational, Failure> {
    let overflow = || {
        Failure(
            HamloopStatus::Overflow,
            format!("{v} does not fit in 64 bits"),
        )
    };
    Ok(HamloopRational {
        num: i64::try_from(v.numer()).map_err(|_| overflow())?,
        den: i64::try_from(v.denom()).map_err(|_| overflow())?,
    })
}

fn boxed<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn hamloop_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hamloop_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `rho` of a `dim x dim` symplectic matrix given row-major, `dim` even.
///
/// # Safety
/// `matrix` must point to `dim * dim` doubles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_rho(
    matrix: *const f64,
    dim: usize,
    re: *mut f64,
    im: *mut f64,
) -> HamloopStatus {
    guard(|| {
        if matrix.is_null() || re.is_null() || im.is_null() {
            return Err(null("argument"));
        }
        if dim == 0 || dim % 2 != 0 {
            return Err(Failure(
                HamloopStatus::InvalidArgument,
                format!("dimension {dim} is not even and positive"),
            ));
        }
        let data = std::slice::from_raw_parts(matrix, dim * dim);
        let m = SymplecticMatrix::new(DMatrix::from_row_slice(dim, dim, data))?;
        let z = rho(&m)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Winding number of the closed path through `len` unit complex samples
/// taken at equally spaced parameters.
///
/// # Safety
/// `re` and `im` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_winding(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut i64,
) -> HamloopStatus {
    guard(|| {
        if re.is_null() || im.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let samples = re
            .iter()
            .zip(im)
            .enumerate()
            .map(|(i, (&a, &b))| (i as f64, Complex64::new(a, b)))
            .collect();
        *out = winding_number(&PhasePath::new(samples)?)?;
        Ok(())
    })
}

/// Exact `I_psi` and `I_psi_tilde` of the Hirzebruch surface `(k, tau, mu)`;
/// `tau` and `mu` are rationals such as `"3"` or `"7/2"`.
///
/// # Safety
/// String arguments must be NUL-terminated; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_hirzebruch_closed_form(
    k: u32,
    tau: *const c_char,
    mu: *const c_char,
    i_psi: *mut HamloopRational,
    i_psi_tilde: *mut HamloopRational,
) -> HamloopStatus {
    guard(|| {
        if i_psi.is_null() || i_psi_tilde.is_null() {
            return Err(null("output"));
        }
        let t = DelzantTrapezoid::parse(k, str_arg(tau, "tau")?, str_arg(mu, "mu")?)?;
        let (a, b) = closed_form_invariants(&t);
        *i_psi = rational(&a)?;
        *i_psi_tilde = rational(&b)?;
        Ok(())
    })
}

/// Rotation of the round sphere with cap overlap half-width `epsilon_hat`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_scenario_sphere(
    epsilon_hat: f64,
    out: *mut *mut HamloopScenario,
) -> HamloopStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = Kind::Sphere(SphereScenario::new(epsilon_hat)?);
        boxed(out, HamloopScenario { kind });
        Ok(())
    })
}

/// Reparameterized loop on the torus of dimension `2n` with a seeded Hamiltonian.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_scenario_torus(
    n: usize,
    seed: u64,
    out: *mut *mut HamloopScenario,
) -> HamloopStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = Kind::Torus(TorusScenario::new(n, seed)?);
        boxed(out, HamloopScenario { kind });
        Ok(())
    })
}

/// Hirzebruch surface `(k, tau, mu)` on the default radius ladder.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_scenario_hirzebruch(
    k: u32,
    tau: *const c_char,
    mu: *const c_char,
    out: *mut *mut HamloopScenario,
) -> HamloopStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = Kind::Hirzebruch(HirzebruchScenario::parse(
            k,
            str_arg(tau, "tau")?,
            str_arg(mu, "mu")?,
        )?);
        boxed(out, HamloopScenario { kind });
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from a `hamloop_scenario_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn hamloop_scenario_free(scenario: *mut HamloopScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the scenario with its default quadrature.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_scenario_run(
    scenario: *const HamloopScenario,
    out: *mut *mut HamloopReport,
) -> HamloopStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let outcome = match &(*scenario).kind {
            Kind::Sphere(s) => s.run(&QuadratureSpec::default())?.outcome(),
            Kind::Torus(s) => s.run(&QuadratureSpec::default())?.outcome(),
            Kind::Hirzebruch(s) => s.run(&HirzebruchScenario::default_quadrature())?.outcome(),
        };
        let json = serde_json::to_string(&outcome)
            .map_err(|e| Failure(HamloopStatus::NumericalFailure, e.to_string()))?;
        let json = CString::new(json)
            .map_err(|e| Failure(HamloopStatus::NumericalFailure, e.to_string()))?;
        let names = outcome
            .checks
            .iter()
            .map(|c| CString::new(c.name.clone()).unwrap_or_default())
            .collect();
        boxed(
            out,
            HamloopReport {
                outcome,
                json,
                names,
            },
        );
        Ok(())
    })
}

/// Whether every check of the report passed; false for a null report.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hamloop_report_passed(report: *const HamloopReport) -> bool {
    !report.is_null() && (*report).outcome.passed
}

/// Number of checks in the report; zero for a null report.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hamloop_report_check_count(report: *const HamloopReport) -> usize {
    if report.is_null() {
        0
    } else {
        (*report).outcome.checks.len()
    }
}

/// Copies check `index` into `out`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hamloop_report_check(
    report: *const HamloopReport,
    index: usize,
    out: *mut HamloopCheck,
) -> HamloopStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let r = &*report;
        let c = r.outcome.checks.get(index).ok_or_else(|| {
            Failure(
                HamloopStatus::InvalidArgument,
                format!(
                    "check index {index} out of range {}",
                    r.outcome.checks.len()
                ),
            )
        })?;
        *out = HamloopCheck {
            name: r.names[index].as_ptr(),
            expected: c.expected,
            actual: c.actual,
            tolerance: c.tolerance,
            relative: c.relative,
            passed: c.passed,
        };
        Ok(())
    })
}

/// Full report as JSON, owned by the report; null for a null report.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hamloop_report_json(report: *const HamloopReport) -> *const c_char {
    if report.is_null() {
        ptr::null()
    } else {
        (*report).json.as_ptr()
    }
}

/// # Safety
/// `report` must come from `hamloop_scenario_run`, or be null.
#[no_mangle]
pub unsafe extern "C" fn hamloop_report_free(report: *mut HamloopReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

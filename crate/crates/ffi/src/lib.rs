//! C ABI for the `cuspidal` library.
//!
//! Models are opaque handles created from JSON and released with
//! [`cusp_model_free`]. Every fallible function returns a [`CuspStatus`];
//! on failure the message is available from [`cusp_last_error`] until the next
//! call on the same thread. Strings returned through `char **` outputs are
//! owned by the caller and released with [`cusp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cuspidal::brieskorn::reduce;
use cuspidal::flows::{period_lattice, Generator, LatticeMethod, SymplecticModel};
use cuspidal::gk::Tolerance;
use cuspidal::model::Stratum;
use cuspidal::quadrature::{action_chart, loop_action, passage_time, wide_action, GridSpec};
use cuspidal::specfun::{constants, gamma};
use cuspidal::{Density, Error, FibrationModel};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    Pole = 4,
    Unsupported = 5,
    NoConvergence = 6,
    Degenerate = 7,
    Panic = 8,
}

/// Which torus of a fiber.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspStratum {
    Narrow = 0,
    Wide = 1,
}

/// Generator of a Hamiltonian flow.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspGenerator {
    H = 0,
    F = 1,
}

/// Opaque model handle.
pub struct CuspModel {
    model: FibrationModel,
    symplectic: SymplecticModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CuspStatus {
    match e {
        Error::InvalidInput(_) => CuspStatus::InvalidInput,
        Error::Domain(_) => CuspStatus::Domain,
        Error::Pole(_) => CuspStatus::Pole,
        Error::Unsupported(_) => CuspStatus::Unsupported,
        Error::NoConvergence(_) => CuspStatus::NoConvergence,
        Error::Degenerate(_) => CuspStatus::Degenerate,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CuspStatus, String)>) -> CuspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CuspStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            CuspStatus::Panic
        }
    }
}

fn lib(e: Error) -> (CuspStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CuspStatus, String) {
    (CuspStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CuspStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (CuspStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn model_arg<'a>(m: *const CuspModel) -> Result<&'a CuspModel, (CuspStatus, String)> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (CuspStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failure on this thread (empty after a success).
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn cusp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cusp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a model from JSON `{"kind": …, "density": …, "x0": …, "mu_shift": …}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cusp_model_from_json(json: *const c_char, out: *mut *mut CuspModel) -> CuspStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model: FibrationModel =
            serde_json::from_str(text).map_err(|e| (CuspStatus::InvalidInput, format!("model JSON: {e}")))?;
        let symplectic = SymplecticModel::new(model.clone()).map_err(lib)?;
        *out = Box::into_raw(Box::new(CuspModel { model, symplectic }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `m` must come from [`cusp_model_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cusp_model_free(m: *mut CuspModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// The constants `C₀`, `C₁` of the basic periods.
///
/// # Safety
/// Outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cusp_constants(c0: *mut f64, c1: *mut f64) -> CuspStatus {
    guard(|| {
        let c = constants();
        write(c0, c.c0, "c0")?;
        write(c1, c.c1, "c1")
    })
}

/// `Γ(x)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cusp_gamma(x: f64, out: *mut f64) -> CuspStatus {
    guard(|| write(out, gamma(x).map_err(lib)?, "out"))
}

/// Passage time Π(H, λ) between the sections.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cusp_passage_time(m: *const CuspModel, h: f64, lambda: f64, out: *mut f64) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        write(out, passage_time(&m.model, h, lambda, Tolerance::default()).map_err(lib)?, "out")
    })
}

/// Action of the torus in the given stratum: `I∘` (narrow) or `I_μ` (wide).
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cusp_action(
    m: *const CuspModel,
    h: f64,
    lambda: f64,
    stratum: CuspStratum,
    out: *mut f64,
) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        let tol = Tolerance::default();
        let v = match stratum {
            CuspStratum::Narrow => loop_action(&m.model, h, lambda, tol),
            CuspStratum::Wide => wide_action(&m.model, h, lambda, m.model.mu_shift, tol),
        };
        write(out, v.map_err(lib)?, "out")
    })
}

/// Brieskorn reduction of a density JSON; writes `{"alpha": […], "beta": […]}`.
///
/// # Safety
/// `density_json` must be NUL-terminated; `out` a valid pointer. Free the
/// result with [`cusp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cusp_decompose(density_json: *const c_char, out: *mut *mut c_char) -> CuspStatus {
    guard(|| {
        let text = str_arg(density_json, "density_json")?;
        let f: Density =
            serde_json::from_str(text).map_err(|e| (CuspStatus::InvalidInput, format!("density JSON: {e}")))?;
        let pair = reduce(&f).map_err(lib)?;
        let s = serde_json::to_string(&pair).map_err(|e| (CuspStatus::InvalidInput, e.to_string()))?;
        write(out, owned_string(s), "out")
    })
}

/// Action chart on the model's default `nh × nl` grid, as CSV.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer. Free the result with
/// [`cusp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cusp_action_chart_csv(m: *const CuspModel, nh: usize, nl: usize, out: *mut *mut c_char) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        if nh == 0 || nl == 0 {
            return Err((CuspStatus::InvalidInput, "grid needs at least one point per axis".into()));
        }
        let chart = action_chart(&m.model, &GridSpec::default_for(&m.model, nh, nl), Tolerance::default());
        write(out, owned_string(chart.to_csv()), "out")
    })
}

/// Hamiltonian field of `H` or `F` at `(x, y, λ, φ)`.
///
/// # Safety
/// `point` must point to 4 doubles and `out` to room for 4.
#[no_mangle]
pub unsafe extern "C" fn cusp_hamiltonian_field(
    m: *const CuspModel,
    generator: CuspGenerator,
    point: *const f64,
    out: *mut f64,
) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        if point.is_null() || out.is_null() {
            return Err(null("point or out"));
        }
        let p: [f64; 4] = std::slice::from_raw_parts(point, 4).try_into().expect("four components");
        let g = match generator {
            CuspGenerator::H => Generator::H,
            CuspGenerator::F => Generator::F,
        };
        let v = m.symplectic.hamiltonian_field(g, &p).map_err(lib)?;
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&v);
        Ok(())
    })
}

/// Flow of `H` or `F` for time `t`, in place on `point` (4 doubles).
///
/// # Safety
/// `point` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn cusp_flow(m: *const CuspModel, generator: CuspGenerator, t: f64, point: *mut f64) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        if point.is_null() {
            return Err(null("point"));
        }
        let slot = std::slice::from_raw_parts_mut(point, 4);
        let p: [f64; 4] = (&*slot).try_into().expect("four components");
        let g = match generator {
            CuspGenerator::H => Generator::H,
            CuspGenerator::F => Generator::F,
        };
        let q = m.symplectic.flow(&p, g, t).map_err(lib)?;
        slot.copy_from_slice(&q);
        Ok(())
    })
}

/// Period lattice basis (row-major 2×2: rows are `(t_H, t_F)` lattice vectors).
///
/// # Safety
/// `out` must have room for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn cusp_period_lattice(
    m: *const CuspModel,
    h: f64,
    lambda: f64,
    stratum: CuspStratum,
    out: *mut f64,
) -> CuspStatus {
    guard(|| {
        let m = model_arg(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = match stratum {
            CuspStratum::Narrow => Stratum::Narrow,
            CuspStratum::Wide => Stratum::Wide,
        };
        let lat = period_lattice(&m.model, h, lambda, s, LatticeMethod::default(), Tolerance::tight()).map_err(lib)?;
        let flat = [lat.basis[0][0], lat.basis[0][1], lat.basis[1][0], lat.basis[1][1]];
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&flat);
        Ok(())
    })
}

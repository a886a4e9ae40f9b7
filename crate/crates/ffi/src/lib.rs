//! C ABI over the `kgsym` solver.
//!
//! A `KgSolver` is an opaque handle owning one grid, one scheme at a fixed
//! step size, and the current state. Every fallible call returns a
//! `KgStatus`; on failure the handle keeps a message readable through
//! `kg_solver_last_error` until the next call on that handle. States cross
//! the boundary as physical grid values, `2N` doubles per component, at the
//! points `x_k = (k - N)π/N`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kgsym::diagnostics::energy;
use kgsym::grid::to_physical;
use kgsym::initial_data::{make_rough, make_soliton, RoughDatumSpec, SolitonDatumSpec};
use kgsym::{Grid, KgError, Nonlinearity, Scheme, StateU, Stepper};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BlowUp = 3,
    NotReal = 4,
    Panic = 5,
}

impl KgStatus {
    fn of(e: &KgError) -> Self {
        match e {
            KgError::BlowUp { .. } => KgStatus::BlowUp,
            KgError::SymmetryViolation { .. } => KgStatus::NotReal,
            _ => KgStatus::InvalidArgument,
        }
    }
}

pub struct KgSolver {
    grid: Grid,
    scheme: Scheme,
    nl: Nonlinearity,
    tau: f64,
    stepper: Stepper,
    last_error: CString,
}

impl KgSolver {
    fn reset(&mut self, state: StateU) -> Result<(), KgError> {
        self.stepper = Stepper::new(self.scheme, state, self.tau, self.nl)?;
        Ok(())
    }

    fn record(&mut self, e: &KgError) -> KgStatus {
        self.last_error = CString::new(e.to_string()).unwrap_or_default();
        KgStatus::of(e)
    }
}

unsafe fn text<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        None
    } else {
        CStr::from_ptr(p).to_str().ok()
    }
}

fn guarded(f: impl FnOnce() -> KgStatus) -> KgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(KgStatus::Panic)
}

/// Runs `f` on a live handle, recording any error message on it.
unsafe fn with_solver(
    solver: *mut KgSolver,
    f: impl FnOnce(&mut KgSolver) -> Result<(), KgError>,
) -> KgStatus {
    let Some(s) = solver.as_mut() else {
        return KgStatus::NullPointer;
    };
    guarded(|| {
        s.last_error = CString::default();
        match f(s) {
            Ok(()) => KgStatus::Ok,
            Err(e) => s.record(&e),
        }
    })
}

/// Creates a solver with `2n` grid points, starting from the zero state.
/// `scheme` is one of "lri1", "slri1", "lri2", "slri2"; `nonlinearity` one
/// of "sine", "cubic", "linear".
///
/// # Safety
/// The strings must be NUL-terminated and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_new(
    n: usize,
    scheme: *const c_char,
    nonlinearity: *const c_char,
    tau: f64,
    out: *mut *mut KgSolver,
) -> KgStatus {
    if out.is_null() {
        return KgStatus::NullPointer;
    }
    *out = std::ptr::null_mut();
    let (Some(scheme), Some(nl)) = (text(scheme), text(nonlinearity)) else {
        return KgStatus::NullPointer;
    };
    guarded(|| {
        let built = (|| -> Result<KgSolver, KgError> {
            let grid = Grid::new(n)?;
            let scheme: Scheme = scheme.parse()?;
            let nl = Nonlinearity::by_name(nl)?;
            let stepper = Stepper::new(scheme, StateU::zeros(&grid), tau, nl)?;
            Ok(KgSolver {
                grid,
                scheme,
                nl,
                tau,
                stepper,
                last_error: CString::default(),
            })
        })();
        match built {
            Ok(s) => {
                *out = Box::into_raw(Box::new(s));
                KgStatus::Ok
            }
            Err(e) => KgStatus::of(&e),
        }
    })
}

/// # Safety
/// `solver` must come from `kg_solver_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_free(solver: *mut KgSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Number of grid points `2N`, the length of every state array.
///
/// # Safety
/// `solver` must be a live handle or null (which returns 0).
#[no_mangle]
pub unsafe extern "C" fn kg_solver_num_points(solver: *const KgSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.grid.num_points())
}

/// Replaces the state by grid values of `u` and `∂ₜu` and resets time to 0.
///
/// # Safety
/// `u` and `v` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_set_state(
    solver: *mut KgSolver,
    u: *const f64,
    v: *const f64,
    len: usize,
) -> KgStatus {
    if u.is_null() || v.is_null() {
        return KgStatus::NullPointer;
    }
    let (u, v) = (std::slice::from_raw_parts(u, len), std::slice::from_raw_parts(v, len));
    with_solver(solver, |s| {
        let state = StateU::from_physical(&s.grid, u, v)?;
        s.reset(state)
    })
}

/// Loads the seeded random datum (normalized in H¹ × L², times `scale`)
/// and resets time to 0.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_set_rough_datum(
    solver: *mut KgSolver,
    theta: f64,
    seed: u64,
    max_frequency: usize,
    scale: f64,
) -> KgStatus {
    with_solver(solver, |s| {
        let spec = RoughDatumSpec::new(theta, seed, max_frequency).scaled(scale);
        let state = make_rough(&spec, &s.grid)?;
        s.reset(state)
    })
}

/// Loads the sech soliton datum and resets time to 0.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_set_soliton(
    solver: *mut KgSolver,
    a: f64,
    b: f64,
    c: f64,
    amplitude: f64,
) -> KgStatus {
    with_solver(solver, |s| {
        let spec = SolitonDatumSpec { a, b, c, amplitude };
        let state = make_soliton(&spec, &s.grid)?;
        s.reset(state)
    })
}

/// Advances `n_steps` steps. A blow-up leaves the non-finite state in place.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_step(solver: *mut KgSolver, n_steps: usize) -> KgStatus {
    with_solver(solver, |s| {
        for _ in 0..n_steps {
            s.stepper.step()?;
        }
        Ok(())
    })
}

/// Writes the current grid values of `u` and `∂ₜu`.
///
/// # Safety
/// `u` and `v` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_get_state(
    solver: *mut KgSolver,
    u: *mut f64,
    v: *mut f64,
    len: usize,
) -> KgStatus {
    if u.is_null() || v.is_null() {
        return KgStatus::NullPointer;
    }
    with_solver(solver, |s| {
        let n = s.grid.num_points();
        if len != n {
            return Err(KgError::Dimension { expected: n, got: len });
        }
        let state = s.stepper.state();
        let (pu, pv) = (to_physical(&state.u)?, to_physical(&state.v)?);
        std::slice::from_raw_parts_mut(u, len).copy_from_slice(&pu);
        std::slice::from_raw_parts_mut(v, len).copy_from_slice(&pv);
        Ok(())
    })
}

/// Discrete energy of the current state.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_energy(solver: *mut KgSolver, out: *mut f64) -> KgStatus {
    if out.is_null() {
        return KgStatus::NullPointer;
    }
    with_solver(solver, |s| {
        *out = energy(s.stepper.state(), &s.nl);
        Ok(())
    })
}

/// Time reached, steps taken times τ.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_time(solver: *mut KgSolver, out: *mut f64) -> KgStatus {
    if out.is_null() {
        return KgStatus::NullPointer;
    }
    with_solver(solver, |s| {
        *out = s.stepper.time();
        Ok(())
    })
}

/// Message of the last failed call on this handle, empty after success.
/// The pointer stays valid until the next call on the handle.
///
/// # Safety
/// `solver` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kg_solver_last_error(solver: *const KgSolver) -> *const c_char {
    match solver.as_ref() {
        Some(s) => s.last_error.as_ptr(),
        None => c"null solver handle".as_ptr(),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn kg_status_message(status: KgStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        KgStatus::Ok => c"ok",
        KgStatus::NullPointer => c"null pointer argument",
        KgStatus::InvalidArgument => c"invalid argument",
        KgStatus::BlowUp => c"solution blew up",
        KgStatus::NotReal => c"field is not real-valued",
        KgStatus::Panic => c"internal error",
    };
    msg.as_ptr()
}

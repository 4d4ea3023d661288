//! C interface to the coupled GRP solver.
//!
//! Every function returns a [`CgrpStatus`]. On failure the message of the
//! most recent error on the calling thread is available from
//! [`cgrp_last_error_message`]. Simulations live behind an opaque
//! [`CgrpSimulation`] handle that must be released with
//! [`cgrp_simulation_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cgrp::config::parse_config;
use cgrp::coupled_rp::{solve_coupled_rp, CouplingData};
use cgrp::driver::{CouplingMode, Simulation};
use cgrp::{Error, GasParams, PrimState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgrpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Configuration text could not be parsed.
    Parse = 2,
    /// Arguments or configuration values are out of range.
    Invalid = 3,
    /// A solver failed (vacuum, supersonic interface, singular system, ...).
    Numerical = 4,
    /// Internal panic caught at the boundary.
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgrpMode {
    /// One coupled GRP solve per window, independent steppers.
    Grp = 0,
    /// Common time step with a coupled Riemann problem per step.
    SyncRp = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgrpSide {
    Left = 0,
    Right = 1,
}

/// Summary of one synchronization window.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CgrpWindow {
    pub t0: f64,
    pub t1: f64,
    /// Determinant of the coupling matrix, NaN in synchronized mode.
    pub det: f64,
    pub steps_left: usize,
    pub steps_right: usize,
}

/// Opaque simulation handle.
pub struct CgrpSimulation {
    sim: Simulation,
    t_end: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CgrpStatus {
    match e.root() {
        Error::Parse { .. } => CgrpStatus::Parse,
        Error::Validation(_) | Error::Io(_) => CgrpStatus::Invalid,
        _ => CgrpStatus::Numerical,
    }
}

/// Runs `f`, recording errors and panics for `cgrp_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (CgrpStatus, String)>) -> CgrpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CgrpStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            CgrpStatus::Panic
        }
    }
}

fn lift(e: Error) -> (CgrpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CgrpStatus, String) {
    (CgrpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn sim_ref<'a>(sim: *const CgrpSimulation) -> Result<&'a CgrpSimulation, (CgrpStatus, String)> {
    sim.as_ref().ok_or_else(|| null("simulation handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (CgrpStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_state(p: *const f64, what: &str) -> Result<PrimState, (CgrpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(PrimState::new(s[0], s[1], s[2]))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cgrp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a simulation from configuration text. `level < 0` uses the level
/// from the configuration. On success `*out` receives a new handle.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_new(
    config: *const c_char,
    level: i32,
    mode: CgrpMode,
    out: *mut *mut CgrpSimulation,
) -> CgrpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        if config.is_null() {
            return Err(null("config"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|_| (CgrpStatus::Invalid, "config is not valid UTF-8".to_string()))?;
        let cfg = parse_config(text).map_err(lift)?;
        let level = u32::try_from(level).unwrap_or(cfg.level);
        let mode = match mode {
            CgrpMode::Grp => CouplingMode::Grp,
            CgrpMode::SyncRp => CouplingMode::SyncRp,
        };
        let sim = cfg.build(level, cfg.settings(mode, true)).map_err(lift)?;
        *out = Box::into_raw(Box::new(CgrpSimulation { sim, t_end: cfg.t_end }));
        Ok(())
    })
}

/// Releases a handle. Null is accepted.
///
/// # Safety
/// `sim` must come from `cgrp_simulation_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_free(sim: *mut CgrpSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances the simulation to time `t` (no-op if already there).
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_advance_to(sim: *mut CgrpSimulation, t: f64) -> CgrpStatus {
    guard(|| {
        let s = out_ref(sim, "simulation handle")?;
        if !t.is_finite() {
            return Err((CgrpStatus::Invalid, format!("target time {t} is not finite")));
        }
        s.sim.advance_to(t).map_err(lift)
    })
}

/// Current simulation time.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_time(sim: *const CgrpSimulation, out: *mut f64) -> CgrpStatus {
    guard(|| {
        *out_ref(out, "out")? = sim_ref(sim)?.sim.t();
        Ok(())
    })
}

/// Final time from the configuration.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_end_time(sim: *const CgrpSimulation, out: *mut f64) -> CgrpStatus {
    guard(|| {
        *out_ref(out, "out")? = sim_ref(sim)?.t_end;
        Ok(())
    })
}

/// Total mass in both domains.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_total_mass(sim: *const CgrpSimulation, out: *mut f64) -> CgrpStatus {
    guard(|| {
        *out_ref(out, "out")? = sim_ref(sim)?.sim.total_mass();
        Ok(())
    })
}

/// Number of cells in one domain.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_cell_count(
    sim: *const CgrpSimulation,
    side: CgrpSide,
    out: *mut usize,
) -> CgrpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let dom = match side {
            CgrpSide::Left => &s.sim.left,
            CgrpSide::Right => &s.sim.right,
        };
        *out_ref(out, "out")? = dom.grid.n_cells;
        Ok(())
    })
}

/// Copies cell centres and primitive cell values of one domain into arrays
/// of length `len`, which must equal the cell count. Any output pointer may
/// be null to skip it.
///
/// # Safety
/// Non-null output pointers must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_primitives(
    sim: *const CgrpSimulation,
    side: CgrpSide,
    x: *mut f64,
    rho: *mut f64,
    u: *mut f64,
    p: *mut f64,
    len: usize,
) -> CgrpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let dom = match side {
            CgrpSide::Left => &s.sim.left,
            CgrpSide::Right => &s.sim.right,
        };
        if len != dom.grid.n_cells {
            return Err((
                CgrpStatus::Invalid,
                format!("buffer length {len} does not match {} cells", dom.grid.n_cells),
            ));
        }
        let prims = dom.prims(&s.sim.gas).map_err(lift)?;
        for (i, w) in prims.iter().enumerate() {
            for (ptr, v) in [(x, dom.grid.center(i)), (rho, w.rho), (u, w.u), (p, w.p)] {
                if !ptr.is_null() {
                    *ptr.add(i) = v;
                }
            }
        }
        Ok(())
    })
}

/// Number of windows completed so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_window_count(sim: *const CgrpSimulation, out: *mut usize) -> CgrpStatus {
    guard(|| {
        *out_ref(out, "out")? = sim_ref(sim)?.sim.windows.len();
        Ok(())
    })
}

/// Summary of window `index` (0-based).
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cgrp_simulation_window(
    sim: *const CgrpSimulation,
    index: usize,
    out: *mut CgrpWindow,
) -> CgrpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let w = s.sim.windows.get(index).ok_or_else(|| {
            (
                CgrpStatus::Invalid,
                format!("window {index} out of range ({} windows)", s.sim.windows.len()),
            )
        })?;
        *out_ref(out, "out")? = CgrpWindow {
            t0: w.window.t0,
            t1: w.window.t1,
            det: w.det,
            steps_left: w.steps_left,
            steps_right: w.steps_right,
        };
        Ok(())
    })
}

/// Interface traces of the coupled Riemann problem between `left` and
/// `right` (each `rho, u, p`) with the given outtake. The traces are written
/// as `rho, u, p` triples.
///
/// # Safety
/// All pointers must reference three doubles.
#[no_mangle]
pub unsafe extern "C" fn cgrp_coupled_riemann(
    left: *const f64,
    right: *const f64,
    outtake: f64,
    gamma: f64,
    r_sgc: f64,
    left_trace: *mut f64,
    right_trace: *mut f64,
) -> CgrpStatus {
    guard(|| {
        let (l, r) = (read_state(left, "left")?, read_state(right, "right")?);
        if left_trace.is_null() || right_trace.is_null() {
            return Err(null("trace output"));
        }
        let g = GasParams::new(gamma, r_sgc).map_err(lift)?;
        let cpl = CouplingData::new(outtake, 0.0).map_err(lift)?;
        let st = solve_coupled_rp(&l, &r, &cpl, &g).map_err(lift)?;
        std::slice::from_raw_parts_mut(left_trace, 3).copy_from_slice(&st.left_trace.as_array());
        std::slice::from_raw_parts_mut(right_trace, 3).copy_from_slice(&st.right_trace.as_array());
        Ok(())
    })
}

//! Coupled half-Riemann problem for the gas-generator interface.
//!
//! The left trace lies on the forward 1-curve of the left state and the right
//! trace shares its pressure and density; its velocity lies on the backward
//! 3-curve of the right state, the density jump being absorbed by a contact
//! that moves into the right domain. With the interface pressure as the only
//! unknown the coupling reduces to the scalar equation
//! `u_left(p) - u_right(p) - E / rho_left(p) = 0`.

use crate::error::{Error, Result};
use crate::euler::{GasParams, PrimState};
use crate::riemann::{wave_density, wave_function, WaveKind};

/// Outtake magnitude and its time derivative at the current instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CouplingData {
    pub outtake: f64,
    pub outtake_rate: f64,
}

impl CouplingData {
    pub fn new(outtake: f64, outtake_rate: f64) -> Result<Self> {
        if !(outtake >= 0.0) || !outtake_rate.is_finite() {
            return Err(Error::Validation(format!(
                "outtake must be >= 0 and finite, got ({outtake}, {outtake_rate})"
            )));
        }
        Ok(Self {
            outtake,
            outtake_rate,
        })
    }
}

/// Interface traces of the associated coupled Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledStarState {
    pub left_trace: PrimState,
    pub right_trace: PrimState,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
    /// Density between the contact and the right-going 3-wave.
    pub right_wave_rho: f64,
}

impl CoupledStarState {
    /// The state behind the 3-wave (right of the contact).
    pub fn right_wave_state(&self) -> PrimState {
        PrimState::new(self.right_wave_rho, self.right_trace.u, self.right_trace.p)
    }

    /// Momentum jump across the interface, equal to the outtake.
    pub fn momentum_jump(&self) -> f64 {
        self.left_trace.rho * self.left_trace.u - self.right_trace.rho * self.right_trace.u
    }
}

const MAX_ITER: usize = 100;

fn residual(p: f64, ul: &PrimState, ur: &PrimState, outtake: f64, g: &GasParams) -> (f64, f64) {
    let (fl, dfl) = wave_function(p, ul, g);
    let (fr, dfr) = wave_function(p, ur, g);
    let (rho, drho) = wave_density(p, ul, g);
    let f = (ul.u - fl) - (ur.u + fr) - outtake / rho;
    let df = -dfl - dfr + outtake * drho / (rho * rho);
    (f, df)
}

pub fn solve_coupled_rp(
    ul: &PrimState,
    ur: &PrimState,
    cpl: &CouplingData,
    g: &GasParams,
) -> Result<CoupledStarState> {
    ul.check()?;
    ur.check()?;
    if !(cpl.outtake >= 0.0) {
        return Err(Error::Validation(format!("negative outtake {}", cpl.outtake)));
    }
    let e = cpl.outtake;

    let star = if e == 0.0 && ul == ur {
        CoupledStarState {
            left_trace: *ul,
            right_trace: *ur,
            left_wave: WaveKind::Rarefaction,
            right_wave: WaveKind::Rarefaction,
            right_wave_rho: ur.rho,
        }
    } else {
        let floor = (1e-6 * ul.p.min(ur.p)).max(1e-10);
        let mut hi = 10.0 * ul.p.max(ur.p);
        if residual(hi, ul, ur, e, g).0 > 0.0 {
            return Err(Error::NoConvergence(format!(
                "interface pressure above bracket {hi:e}"
            )));
        }
        // The outtake term makes the residual fall again as the left density
        // vanishes; search downwards for the upper (physical) root only.
        let mut lo = ul.p.min(ur.p);
        while residual(lo, ul, ur, e, g).0 <= 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < floor {
                return Err(Error::VacuumState(format!(
                    "no interface pressure above {floor:e} satisfies the coupling"
                )));
            }
        }
        let tol = 1e-12 * (ul.u.abs() + ur.u.abs()).max(1.0);
        // acoustic estimate as the starting point
        let zl = ul.rho * ul.sound_speed(g);
        let zr = ur.rho * ur.sound_speed(g);
        let mut p = ((zr * ul.p + zl * ur.p + zl * zr * (ul.u - ur.u - e / ul.rho)) / (zl + zr))
            .clamp(lo, hi);
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let (f, df) = residual(p, ul, ur, e, g);
            if f.abs() < tol {
                converged = true;
                break;
            }
            if f > 0.0 {
                lo = p;
            } else {
                hi = p;
            }
            let mut next = p - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                p = next;
                converged = true;
                break;
            }
            p = next;
        }
        if !converged {
            return Err(Error::NoConvergence(format!(
                "coupled Riemann solver after {MAX_ITER} iterations"
            )));
        }
        let (fl, _) = wave_function(p, ul, g);
        let (rho, _) = wave_density(p, ul, g);
        let (rho_r, _) = wave_density(p, ur, g);
        let u_left = ul.u - fl;
        CoupledStarState {
            left_trace: PrimState::new(rho, u_left, p),
            // velocity taken from the coupling condition so it holds to round-off
            right_trace: PrimState::new(rho, u_left - e / rho, p),
            left_wave: if p > ul.p {
                WaveKind::Shock
            } else {
                WaveKind::Rarefaction
            },
            right_wave: if p > ur.p {
                WaveKind::Shock
            } else {
                WaveKind::Rarefaction
            },
            right_wave_rho: rho_r,
        }
    };

    for (name, s) in [("left", star.left_trace), ("right", star.right_trace)] {
        let c = s.sound_speed(g);
        if !(s.u.abs() < c) {
            return Err(Error::SupersonicInterface(format!(
                "{name} trace u = {} with c = {c}",
                s.u
            )));
        }
        if s.u < 0.0 {
            return Err(Error::NegativeVelocity(format!("{name} trace u = {}", s.u)));
        }
    }
    Ok(star)
}

/// `(p_left - p_right, rho_left - rho_right, u_left - u_right - E / rho_left)`.
pub fn coupling_residual(st: &CoupledStarState, cpl: &CouplingData) -> [f64; 3] {
    let l = &st.left_trace;
    let r = &st.right_trace;
    [l.p - r.p, l.rho - r.rho, l.u - r.u - cpl.outtake / l.rho]
}

/// Componentwise residual scaled by the magnitude of the traces.
pub fn relative_residual(st: &CoupledStarState, cpl: &CouplingData) -> [f64; 3] {
    let r = coupling_residual(st, cpl);
    let l = &st.left_trace;
    [
        r[0].abs() / l.p,
        r[1].abs() / l.rho,
        r[2].abs() / l.u.abs().max(st.right_trace.u.abs()).max(1.0),
    ]
}

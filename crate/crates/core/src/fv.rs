//! Second-order finite-volume stepper for one Euler domain next to the interface.
//!
//! MUSCL-Hancock in primitive variables with limited slopes, exact Riemann
//! fluxes at interior faces, a pinned far-field state imposed through a
//! Riemann problem, and interface fluxes taken from a prescribed trace.

use crate::coupled_grp::InterfaceBoundarySeries;
use crate::error::{Error, Result};
use crate::euler::{cons_to_prim, flux, ConsState, GasParams, PrimState};
use crate::grp::SideSlopes;
use crate::outtake::OuttakeProfile;
use crate::riemann::interface_state;

/// Which side of the interface a domain lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSide {
    /// Interface at `x_max`.
    Left,
    /// Interface at `x_min`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub side: DomainSide,
}

impl DomainGrid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, side: DomainSide) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() || n_cells < 2 {
            return Err(Error::Validation(format!(
                "grid needs x_max > x_min and at least 2 cells, got [{x_min}, {x_max}] with {n_cells}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            side,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn interface_cell(&self) -> usize {
        match self.side {
            DomainSide::Left => self.n_cells - 1,
            DomainSide::Right => 0,
        }
    }
}

/// Far-field boundary: the state outside the domain is held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldSpec {
    pub state: PrimState,
}

/// How the interface face obtains its trace during a step.
#[derive(Debug, Clone, Copy)]
pub enum InterfaceBc<'a> {
    /// Linear trace of the matching side of the series.
    Series(&'a InterfaceBoundarySeries),
    /// Right-domain trace obtained from the left linear trace through the
    /// coupling conditions with the actual outtake.
    Coupled(&'a InterfaceBoundarySeries, &'a OuttakeProfile),
    /// Trace held constant over the step.
    Fixed(PrimState),
}

/// Fluxes through the two boundary faces during the last step (flux values,
/// not multiplied by the time step).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryFluxes {
    pub far: ConsState,
    pub interface: ConsState,
}

/// Generalized minmod limiter with an optional TVB relaxation.
///
/// Interior slopes are `minmod(theta * back, central, theta * forward)`,
/// `theta` in `[1, 2]`. A central slope of component `k` stays unlimited
/// while `|slope| <= tvb * dx * scale[k]`; `tvb = 0` gives the plain limiter.
/// `tvb` is a curvature bound in units of 1/length^2 relative to `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeLimiter {
    pub theta: f64,
    pub tvb: f64,
    pub scale: [f64; 3],
}

impl Default for SlopeLimiter {
    fn default() -> Self {
        Self {
            theta: 1.5,
            tvb: 0.0,
            scale: [1.0; 3],
        }
    }
}

impl SlopeLimiter {
    /// Scales `(rho, c, p)` taken from a reference state.
    pub fn relative_to(tvb: f64, w: &PrimState, g: &GasParams) -> Self {
        Self {
            tvb,
            scale: [w.rho, w.sound_speed(g), w.p],
            ..Self::default()
        }
    }

    fn threshold(&self, k: usize, dx: f64) -> f64 {
        self.tvb * dx * self.scale[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainState {
    pub grid: DomainGrid,
    pub t: f64,
    pub cells: Vec<ConsState>,
    pub slopes: Vec<SideSlopes>,
    pub limiter: SlopeLimiter,
}

fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

fn minmod2(a: f64, b: f64) -> f64 {
    minmod3(a, b, a)
}

fn diff(a: &PrimState, b: &PrimState, dx: f64) -> [f64; 3] {
    [(b.rho - a.rho) / dx, (b.u - a.u) / dx, (b.p - a.p) / dx]
}

fn to_slopes(s: [f64; 3]) -> SideSlopes {
    SideSlopes::new(s[0], s[1], s[2])
}

/// Limited primitive slopes: central differences limited by `theta` times
/// the one-sided differences, zero at extrema. Central slopes below the TVB
/// threshold pass unlimited so smooth extrema keep second order. The two
/// boundary cells use their inner one-sided difference limited by the next one.
pub fn limited_slopes(prims: &[PrimState], dx: f64, limiter: &SlopeLimiter) -> Vec<SideSlopes> {
    let n = prims.len();
    let d: Vec<[f64; 3]> = prims.windows(2).map(|w| diff(&w[0], &w[1], dx)).collect();
    (0..n)
        .map(|i| {
            let s = if i == 0 {
                match d.get(1) {
                    Some(next) => std::array::from_fn(|k| minmod2(d[0][k], next[k])),
                    None => d[0],
                }
            } else if i == n - 1 {
                match n.checked_sub(3).map(|j| d[j]) {
                    Some(prev) => std::array::from_fn(|k| minmod2(d[n - 2][k], prev[k])),
                    None => d[n - 2],
                }
            } else {
                let (b, f) = (d[i - 1], d[i]);
                std::array::from_fn(|k| {
                    let c = 0.5 * (b[k] + f[k]);
                    if c.abs() <= limiter.threshold(k, dx) {
                        c
                    } else {
                        minmod3(limiter.theta * b[k], c, limiter.theta * f[k])
                    }
                })
            };
            to_slopes(s)
        })
        .collect()
}

/// Primitive-variable time derivative from the quasi-linear form.
fn prim_rate(w: &PrimState, s: &SideSlopes, g: &GasParams) -> [f64; 3] {
    let c2 = g.gamma * w.p / w.rho;
    [
        -(w.u * s.d_rho_dx + w.rho * s.d_u_dx),
        -(w.u * s.d_u_dx + s.d_p_dx / w.rho),
        -(w.u * s.d_p_dx + w.rho * c2 * s.d_u_dx),
    ]
}

fn shift(w: &PrimState, s: &SideSlopes, h: f64, rate: [f64; 3], tau: f64) -> PrimState {
    PrimState::new(
        w.rho + h * s.d_rho_dx + tau * rate[0],
        w.u + h * s.d_u_dx + tau * rate[1],
        w.p + h * s.d_p_dx + tau * rate[2],
    )
}

fn add_scaled(a: ConsState, b: ConsState, s: f64) -> ConsState {
    ConsState {
        rho: a.rho + s * b.rho,
        mom: a.mom + s * b.mom,
        en: a.en + s * b.en,
    }
}

impl DomainState {
    pub fn new(grid: DomainGrid, t: f64, cells: Vec<ConsState>, g: &GasParams) -> Result<Self> {
        if cells.len() != grid.n_cells {
            return Err(Error::Validation(format!(
                "{} cells for a grid of {}",
                cells.len(),
                grid.n_cells
            )));
        }
        let mut s = Self {
            grid,
            t,
            cells,
            slopes: Vec::new(),
            limiter: SlopeLimiter::default(),
        };
        s.reconstruct(g)?;
        Ok(s)
    }

    /// Cell averages from a primitive-state function sampled at the centres.
    pub fn from_fn(grid: DomainGrid, t: f64, g: &GasParams, f: impl Fn(f64) -> PrimState) -> Result<Self> {
        let cells = (0..grid.n_cells)
            .map(|i| {
                let w = f(grid.center(i));
                w.check()?;
                Ok(w.to_cons(g))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self {
            grid,
            t,
            cells,
            slopes: Vec::new(),
            limiter: SlopeLimiter::default(),
        };
        s.reconstruct(g)?;
        Ok(s)
    }

    pub fn with_limiter(mut self, limiter: SlopeLimiter, g: &GasParams) -> Result<Self> {
        self.limiter = limiter;
        self.reconstruct(g)?;
        Ok(self)
    }

    pub fn prims(&self, g: &GasParams) -> Result<Vec<PrimState>> {
        self.cells.iter().map(|c| cons_to_prim(c, g)).collect()
    }

    /// Recomputes and stores the limited slopes.
    pub fn reconstruct(&mut self, g: &GasParams) -> Result<&[SideSlopes]> {
        let prims = self.prims(g)?;
        self.slopes = limited_slopes(&prims, self.grid.dx(), &self.limiter);
        Ok(&self.slopes)
    }

    /// Totals of the conserved variables (integrals over the domain).
    pub fn totals(&self) -> ConsState {
        let dx = self.grid.dx();
        self.cells.iter().fold(ConsState::default(), |acc, c| add_scaled(acc, *c, dx))
    }

    /// Reconstructed state at the interface face and the slope of the
    /// interface cell, as used for the interface Riemann problem.
    pub fn interface_data(&mut self, g: &GasParams) -> Result<(PrimState, SideSlopes)> {
        self.reconstruct(g)?;
        let i = self.grid.interface_cell();
        let w = cons_to_prim(&self.cells[i], g)?;
        let s = self.slopes[i];
        let h = match self.grid.side {
            DomainSide::Left => 0.5 * self.grid.dx(),
            DomainSide::Right => -0.5 * self.grid.dx(),
        };
        let face = shift(&w, &s, h, [0.0; 3], 0.0);
        if face.is_physical() {
            Ok((face, s))
        } else {
            Ok((w, SideSlopes::ZERO))
        }
    }

    /// Largest characteristic speed over all cells.
    pub fn max_speed(&self, g: &GasParams) -> Result<f64> {
        Ok(self
            .prims(g)?
            .iter()
            .map(|w| w.u.abs() + w.sound_speed(g))
            .fold(0.0, f64::max))
    }

    /// Half-step predicted face states `(x_{i-1/2}^+, x_{i+1/2}^-)` of every
    /// cell. Cells whose predicted states are unphysical fall back to first order.
    fn predicted_faces(&mut self, dt: f64, g: &GasParams) -> Result<Vec<(PrimState, PrimState)>> {
        let prims = self.prims(g)?;
        self.slopes = limited_slopes(&prims, self.grid.dx(), &self.limiter);
        let h = 0.5 * self.grid.dx();
        Ok(prims
            .iter()
            .zip(self.slopes.iter_mut())
            .map(|(w, s)| {
                let rate = prim_rate(w, s, g);
                let lo = shift(w, s, -h, rate, 0.5 * dt);
                let hi = shift(w, s, h, rate, 0.5 * dt);
                if lo.is_physical() && hi.is_physical() {
                    (lo, hi)
                } else {
                    *s = SideSlopes::ZERO;
                    (*w, *w)
                }
            })
            .collect())
    }

    /// Predicted state at the interface face at `t + dt/2`.
    pub fn interface_face_predicted(&mut self, dt: f64, g: &GasParams) -> Result<PrimState> {
        let faces = self.predicted_faces(dt, g)?;
        let i = self.grid.interface_cell();
        Ok(match self.grid.side {
            DomainSide::Left => faces[i].1,
            DomainSide::Right => faces[i].0,
        })
    }

    fn interface_flux(&self, dt: f64, bc: &InterfaceBc, g: &GasParams) -> Result<ConsState> {
        let (t, t_end) = (self.t, self.t + dt);
        let trace = |tt: f64| -> Result<PrimState> {
            let s = match bc {
                InterfaceBc::Series(ser) => match self.grid.side {
                    DomainSide::Left => ser.left_at(tt),
                    DomainSide::Right => ser.right_at(tt),
                },
                InterfaceBc::Coupled(ser, profile) => {
                    let l = ser.left_at(tt);
                    let (e, _) = profile.eval(tt.min(ser.t1));
                    match self.grid.side {
                        DomainSide::Left => l,
                        DomainSide::Right => PrimState::new(l.rho, l.u - e / l.rho, l.p),
                    }
                }
                InterfaceBc::Fixed(s) => *s,
            };
            s.check().map_err(|e| e.context(format!("interface trace at t = {tt}")))?;
            Ok(s)
        };
        match bc {
            InterfaceBc::Fixed(s) => {
                s.check()?;
                Ok(flux(s, g))
            }
            InterfaceBc::Series(ser) | InterfaceBc::Coupled(ser, _) => {
                ser.check_covers(t, t_end)?;
                // Simpson average of the flux of the trace over the step
                let f0 = flux(&trace(t)?, g);
                let fm = flux(&trace(0.5 * (t + t_end))?, g);
                let f1 = flux(&trace(t_end)?, g);
                if f0 == fm && fm == f1 {
                    return Ok(f0);
                }
                let s = add_scaled(add_scaled(f0, f1, 1.0), fm, 4.0);
                Ok(ConsState {
                    rho: s.rho / 6.0,
                    mom: s.mom / 6.0,
                    en: s.en / 6.0,
                })
            }
        }
    }

    /// One MUSCL-Hancock step of length `dt`.
    pub fn step(&mut self, dt: f64, bc: &InterfaceBc, far: &FarFieldSpec, g: &GasParams) -> Result<BoundaryFluxes> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Validation(format!("time step must be positive, got {dt}")));
        }
        let iface = self.interface_flux(dt, bc, g)?;
        let faces = self.predicted_faces(dt, g)?;
        let n = self.grid.n_cells;
        // fluxes[f] sits between cells f-1 and f
        let mut fluxes = vec![ConsState::default(); n + 1];
        for f in 1..n {
            let s = interface_state(&faces[f - 1].1, &faces[f].0, g)
                .map_err(|e| e.context(format!("interior face {f} at t = {}", self.t)))?;
            fluxes[f] = flux(&s, g);
        }
        let far_flux = match self.grid.side {
            DomainSide::Left => {
                let s = interface_state(&far.state, &faces[0].0, g)?;
                fluxes[0] = flux(&s, g);
                fluxes[n] = iface;
                fluxes[0]
            }
            DomainSide::Right => {
                let s = interface_state(&faces[n - 1].1, &far.state, g)?;
                fluxes[n] = flux(&s, g);
                fluxes[0] = iface;
                fluxes[n]
            }
        };
        let r = dt / self.grid.dx();
        for (i, c) in self.cells.iter_mut().enumerate() {
            let next = add_scaled(add_scaled(*c, fluxes[i], r), fluxes[i + 1], -r);
            if cons_to_prim(&next, g).is_err() {
                return Err(Error::NonPhysicalState(format!(
                    "cell {i} at t = {} after step {dt}: {next:?}",
                    self.t
                )));
            }
            *c = next;
        }
        self.t += dt;
        Ok(BoundaryFluxes {
            far: far_flux,
            interface: iface,
        })
    }
}

/// `dt = c_cfl dx / ((2 p_order + 1) lambda_max)`.
pub fn cfl_dt(state: &DomainState, c_cfl: f64, p_order: u32, g: &GasParams) -> Result<f64> {
    let lam = state.max_speed(g)?;
    Ok(cfl_dt_from_speed(c_cfl, p_order, state.grid.dx(), lam))
}

pub fn cfl_dt_from_speed(c_cfl: f64, p_order: u32, dx: f64, lambda_max: f64) -> f64 {
    c_cfl * dx / ((2 * p_order + 1) as f64 * lambda_max)
}

//! Runs the two domains over synchronization windows.
//!
//! In GRP mode each window starts with one coupled GRP solve at the interface;
//! the resulting linear traces are handed to both steppers, which then advance
//! independently with their own time steps up to the window end. In
//! synchronized mode both domains share every time step and a coupled Riemann
//! problem is solved per step from the half-step predicted interface states.

use crate::config::SimConfig;
use crate::coupled_grp::{boundary_series, derivative_residual, solve_coupled_grp, CoupledDerivatives};
use crate::coupled_rp::{relative_residual, solve_coupled_rp, CoupledStarState, CouplingData};
use crate::error::{Error, Result};
use crate::euler::{ConsState, GasParams};
use crate::fv::{cfl_dt, BoundaryFluxes, DomainState, FarFieldSpec, InterfaceBc};
use crate::outtake::OuttakeProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// One coupled GRP per window, desynchronized steppers.
    #[default]
    Grp,
    /// Common time step with a coupled Riemann problem at every step.
    SyncRp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverSettings {
    pub c_cfl: f64,
    pub p_order: u32,
    pub mode: CouplingMode,
    /// Step the two domains on separate threads within a window.
    pub concurrent: bool,
}

impl Default for DriverSettings {
    fn default() -> Self {
        Self {
            c_cfl: 0.2,
            p_order: 1,
            mode: CouplingMode::Grp,
            concurrent: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncWindow {
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowDiagnostics {
    pub window: SyncWindow,
    pub star: CoupledStarState,
    /// Zero in synchronized mode.
    pub derivs: CoupledDerivatives,
    /// Determinant of the coupling matrix; NaN in synchronized mode.
    pub det: f64,
    pub psi_residual: f64,
    pub derivative_residual: f64,
    pub steps_left: usize,
    pub steps_right: usize,
}

/// Time integrals of the boundary fluxes of both domains.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxTally {
    /// Inflow through the far face of the left domain.
    pub left_far: ConsState,
    /// Outflow of the left domain through the interface.
    pub left_interface: ConsState,
    /// Inflow of the right domain through the interface.
    pub right_interface: ConsState,
    /// Outflow through the far face of the right domain.
    pub right_far: ConsState,
}

fn acc(a: &mut ConsState, f: &ConsState, dt: f64) {
    a.rho += dt * f.rho;
    a.mom += dt * f.mom;
    a.en += dt * f.en;
}

impl FluxTally {
    fn add_left(&mut self, f: &BoundaryFluxes, dt: f64) {
        acc(&mut self.left_far, &f.far, dt);
        acc(&mut self.left_interface, &f.interface, dt);
    }

    fn add_right(&mut self, f: &BoundaryFluxes, dt: f64) {
        acc(&mut self.right_interface, &f.interface, dt);
        acc(&mut self.right_far, &f.far, dt);
    }

    fn merge(&mut self, o: &FluxTally) {
        acc(&mut self.left_far, &o.left_far, 1.0);
        acc(&mut self.left_interface, &o.left_interface, 1.0);
        acc(&mut self.right_interface, &o.right_interface, 1.0);
        acc(&mut self.right_far, &o.right_far, 1.0);
    }

    /// Mass removed at the interface: left outflow minus right inflow.
    pub fn interface_mass_removed(&self) -> f64 {
        self.left_interface.rho - self.right_interface.rho
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub left: DomainState,
    pub right: DomainState,
    pub far_left: FarFieldSpec,
    pub far_right: FarFieldSpec,
    pub profile: OuttakeProfile,
    pub settings: DriverSettings,
    pub gas: GasParams,
    pub tally: FluxTally,
    pub windows: Vec<WindowDiagnostics>,
}

/// Steps one domain up to `t1`, clipping the last step. Returns the step
/// count and the flux integrals.
fn march(
    dom: &mut DomainState,
    t1: f64,
    bc: &InterfaceBc,
    far: &FarFieldSpec,
    settings: &DriverSettings,
    g: &GasParams,
) -> Result<(usize, FluxTally)> {
    let mut tally = FluxTally::default();
    let mut steps = 0;
    let left = dom.grid.side == crate::fv::DomainSide::Left;
    while dom.t < t1 {
        let mut dt = cfl_dt(dom, settings.c_cfl, settings.p_order, g)?;
        let last = dom.t + dt >= t1 * (1.0 - 1e-14) - 1e-300;
        if last {
            dt = t1 - dom.t;
        }
        let f = dom.step(dt, bc, far, g)?;
        if left {
            tally.add_left(&f, dt);
        } else {
            tally.add_right(&f, dt);
        }
        if last {
            dom.t = t1;
        }
        steps += 1;
    }
    Ok((steps, tally))
}

impl Simulation {
    pub fn new(
        left: DomainState,
        right: DomainState,
        far_left: FarFieldSpec,
        far_right: FarFieldSpec,
        profile: OuttakeProfile,
        settings: DriverSettings,
        gas: GasParams,
    ) -> Result<Self> {
        if left.t != right.t {
            return Err(Error::Validation(format!(
                "domains start at different times {} and {}",
                left.t, right.t
            )));
        }
        if !(settings.c_cfl > 0.0 && settings.c_cfl <= 1.0) {
            return Err(Error::Validation(format!("c_cfl must lie in (0, 1], got {}", settings.c_cfl)));
        }
        Ok(Self {
            left,
            right,
            far_left,
            far_right,
            profile,
            settings,
            gas,
            tally: FluxTally::default(),
            windows: Vec::new(),
        })
    }

    pub fn t(&self) -> f64 {
        self.left.t
    }

    /// Total mass of both domains.
    pub fn total_mass(&self) -> f64 {
        self.left.totals().rho + self.right.totals().rho
    }

    fn next_breakpoint(&self, t0: f64) -> Option<f64> {
        let eps = 1e-12 * t0.abs().max(1.0);
        self.profile
            .breakpoints()
            .into_iter()
            .filter(|b| *b > t0 + eps)
            .min_by(f64::total_cmp)
    }

    /// Advances both domains through one window ending no later than `t_stop`.
    pub fn advance_window(&mut self, t_stop: f64) -> Result<WindowDiagnostics> {
        let t0 = self.t();
        if !(t_stop > t0) {
            return Err(Error::Validation(format!("window end {t_stop} not after {t0}")));
        }
        let d = match self.settings.mode {
            CouplingMode::Grp => self.grp_window(t0, t_stop),
            CouplingMode::SyncRp => self.sync_step(t0, t_stop),
        }
        .map_err(|e| e.context(format!("window starting at t = {t0}")))?;
        self.windows.push(d);
        Ok(d)
    }

    fn grp_window(&mut self, t0: f64, t_stop: f64) -> Result<WindowDiagnostics> {
        let g = self.gas;
        let (wl, sl) = self.left.interface_data(&g)?;
        let (wr, sr) = self.right.interface_data(&g)?;
        let (e, de) = self.profile.eval(t0);
        let cpl = CouplingData::new(e, de)?;
        let sol = solve_coupled_grp(&wl, &wr, &sl, &sr, &cpl, &g)?;
        let star = sol.star;
        let c = self.settings.c_cfl;
        let len = (c * self.left.grid.dx() / (star.left_trace.u.abs() + star.left_trace.sound_speed(&g)))
            .min(c * self.right.grid.dx() / (star.right_trace.u.abs() + star.right_trace.sound_speed(&g)));
        let mut t1 = (t0 + len).min(t_stop);
        if let Some(b) = self.next_breakpoint(t0) {
            t1 = t1.min(b);
        }
        let series = boundary_series(&star, &sol.derivs, t0, t1)?;
        let settings = self.settings;
        let (far_l, far_r) = (self.far_left, self.far_right);
        let profile = &self.profile;
        let bc_l = InterfaceBc::Series(&series);
        let bc_r = InterfaceBc::Coupled(&series, profile);
        let (rl, rr) = if settings.concurrent {
            let (left, right) = (&mut self.left, &mut self.right);
            std::thread::scope(|s| {
                let h = s.spawn(|| march(right, t1, &bc_r, &far_r, &settings, &g));
                let rl = march(left, t1, &bc_l, &far_l, &settings, &g);
                (rl, h.join().expect("right-domain stepper panicked"))
            })
        } else {
            (
                march(&mut self.left, t1, &bc_l, &far_l, &settings, &g),
                march(&mut self.right, t1, &bc_r, &far_r, &settings, &g),
            )
        };
        let (steps_left, tl) = rl.map_err(|e| e.context("left domain"))?;
        let (steps_right, tr) = rr.map_err(|e| e.context("right domain"))?;
        self.tally.merge(&tl);
        self.tally.merge(&tr);
        Ok(WindowDiagnostics {
            window: SyncWindow { t0, t1 },
            star,
            derivs: sol.derivs,
            det: sol.det,
            psi_residual: relative_residual(&star, &cpl).into_iter().fold(0.0, f64::max),
            derivative_residual: derivative_residual(&star, &sol.derivs, &cpl).into_iter().fold(0.0, f64::max),
            steps_left,
            steps_right,
        })
    }

    fn sync_step(&mut self, t0: f64, t_stop: f64) -> Result<WindowDiagnostics> {
        let g = self.gas;
        let s = &self.settings;
        let mut dt = cfl_dt(&self.left, s.c_cfl, s.p_order, &g)?.min(cfl_dt(&self.right, s.c_cfl, s.p_order, &g)?);
        if let Some(b) = self.next_breakpoint(t0) {
            dt = dt.min(b - t0);
        }
        let last = t0 + dt >= t_stop;
        if last {
            dt = t_stop - t0;
        }
        let wl = self.left.interface_face_predicted(dt, &g)?;
        let wr = self.right.interface_face_predicted(dt, &g)?;
        let (e, de) = self.profile.eval(t0 + 0.5 * dt);
        let cpl = CouplingData::new(e, de)?;
        let star = solve_coupled_rp(&wl, &wr, &cpl, &g)?;
        let fl = self
            .left
            .step(dt, &InterfaceBc::Fixed(star.left_trace), &self.far_left, &g)
            .map_err(|e| e.context("left domain"))?;
        let fr = self
            .right
            .step(dt, &InterfaceBc::Fixed(star.right_trace), &self.far_right, &g)
            .map_err(|e| e.context("right domain"))?;
        self.tally.add_left(&fl, dt);
        self.tally.add_right(&fr, dt);
        let t1 = if last { t_stop } else { t0 + dt };
        self.left.t = t1;
        self.right.t = t1;
        Ok(WindowDiagnostics {
            window: SyncWindow { t0, t1 },
            star,
            derivs: CoupledDerivatives::default(),
            det: f64::NAN,
            psi_residual: relative_residual(&star, &cpl).into_iter().fold(0.0, f64::max),
            derivative_residual: 0.0,
            steps_left: 1,
            steps_right: 1,
        })
    }

    /// Advances through as many windows as needed to reach `t_stop`.
    pub fn advance_to(&mut self, t_stop: f64) -> Result<()> {
        while self.t() < t_stop {
            self.advance_window(t_stop)?;
        }
        Ok(())
    }
}

/// Both domains at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub left: DomainState,
    pub right: DomainState,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub windows: Vec<WindowDiagnostics>,
    pub tally: FluxTally,
    pub initial_mass: f64,
}

impl RunOutput {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always records the initial snapshot")
    }
}

/// Output times: multiples of the interval strictly inside `(0, t_end)`, then
/// `t_end` itself.
pub fn snapshot_times(t_end: f64, interval: Option<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(dt) = interval.filter(|d| *d > 0.0) {
        let mut k = 1;
        loop {
            let t = k as f64 * dt;
            if t >= t_end * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
    }
    if t_end > 0.0 {
        out.push(t_end);
    }
    out
}

/// Runs a configured simulation at its configured level.
pub fn run(cfg: &SimConfig, settings: DriverSettings) -> Result<RunOutput> {
    let mut sim = cfg.build(cfg.level, settings)?;
    run_simulation(&mut sim, cfg.t_end, cfg.snapshot_interval)
}

pub fn run_simulation(sim: &mut Simulation, t_end: f64, interval: Option<f64>) -> Result<RunOutput> {
    let initial_mass = sim.total_mass();
    let mut snapshots = vec![Snapshot {
        t: sim.t(),
        left: sim.left.clone(),
        right: sim.right.clone(),
    }];
    for t in snapshot_times(t_end, interval) {
        sim.advance_to(t)?;
        snapshots.push(Snapshot {
            t,
            left: sim.left.clone(),
            right: sim.right.clone(),
        });
    }
    Ok(RunOutput {
        snapshots,
        windows: std::mem::take(&mut sim.windows),
        tally: sim.tally,
        initial_mass,
    })
}

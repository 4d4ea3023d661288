//! Single-sided generalized Riemann problem coefficients for ideal-gas Euler.
//!
//! Each nonlinear wave contributes one linear relation between the material
//! derivatives of velocity and pressure at the t-axis,
//! `a Du/Dt + b Dp/Dt = d`, which is then rewritten in terms of the partial
//! time derivatives, `h du/dt + k dp/dt = q`. A third relation,
//! `g_rho drho/dt + g_u du/dt + g_p dp/dt = f`, fixes the density derivative
//! on the side of the contact where the t-axis lies.

use crate::error::{Error, Result};
use crate::euler::{GasParams, PrimState};
use crate::riemann::{exact_rp, shock_speed, wave_density, wave_function, RiemannSolution, WaveKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One-sided spatial derivatives of the primitive variables next to the jump.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideSlopes {
    pub d_rho_dx: f64,
    pub d_u_dx: f64,
    pub d_p_dx: f64,
}

impl SideSlopes {
    pub const ZERO: SideSlopes = SideSlopes {
        d_rho_dx: 0.0,
        d_u_dx: 0.0,
        d_p_dx: 0.0,
    };

    pub const fn new(d_rho_dx: f64, d_u_dx: f64, d_p_dx: f64) -> Self {
        Self {
            d_rho_dx,
            d_u_dx,
            d_p_dx,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.d_rho_dx == 0.0 && self.d_u_dx == 0.0 && self.d_p_dx == 0.0
    }
}

/// The part of a Riemann solution seen by one wave: the undisturbed state it
/// runs into and the state behind it (on the same side of the contact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSideView {
    pub init: PrimState,
    pub star: PrimState,
    pub wave: WaveKind,
    pub side: Side,
}

impl WaveSideView {
    pub fn from_solution(sol: &RiemannSolution, init: &PrimState, side: Side) -> Self {
        match side {
            Side::Left => Self {
                init: *init,
                star: sol.star_left(),
                wave: sol.left_wave,
                side,
            },
            Side::Right => Self {
                init: *init,
                star: sol.star_right(),
                wave: sol.right_wave,
                side,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianCoeffs {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerianCoeffs {
    pub h: f64,
    pub k: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCoeffs {
    pub g_rho: f64,
    pub g_u: f64,
    pub g_p: f64,
    pub f: f64,
}

impl DensityCoeffs {
    /// Density derivative given the velocity and pressure derivatives.
    pub fn solve(&self, du_dt: f64, dp_dt: f64) -> f64 {
        (self.f - self.g_u * du_dt - self.g_p * dp_dt) / self.g_rho
    }
}

/// All coefficients contributed by one side of the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrpSideCoeffs {
    pub lagrangian: LagrangianCoeffs,
    pub eulerian: EulerianCoeffs,
    pub density: DensityCoeffs,
    pub wave: WaveKind,
    pub side: Side,
}

/// Rate of change of the undisturbed state seen from a shock moving at `sigma`,
/// computed from the initial slopes: (drho, du, dp).
fn preshock_rates(init: &PrimState, s: &SideSlopes, sigma: f64, g: &GasParams) -> (f64, f64, f64) {
    let rel = sigma - init.u;
    let c2 = g.gamma * init.p / init.rho;
    (
        rel * s.d_rho_dx - init.rho * s.d_u_dx,
        rel * s.d_u_dx - s.d_p_dx / init.rho,
        rel * s.d_p_dx - init.rho * c2 * s.d_u_dx,
    )
}

/// Partial derivatives of the shock velocity jump with respect to the
/// undisturbed pressure and density.
fn shock_jump_partials(p_star: f64, init: &PrimState, g: &GasParams) -> (f64, f64) {
    let a = 2.0 / ((g.gamma + 1.0) * init.rho);
    let mu2 = g.mu2();
    let b = mu2 * init.p;
    let root = (a / (p_star + b)).sqrt();
    let jump = (p_star - init.p) * root;
    let d_p = -root - 0.5 * (p_star - init.p) * root * mu2 / (p_star + b);
    let d_rho = -0.5 * jump / init.rho;
    (d_p, d_rho)
}

fn centred_wave_factors(view: &WaveSideView, slopes: &SideSlopes, g: &GasParams) -> (f64, f64, f64) {
    let gm = g.gamma;
    let init = &view.init;
    let c = init.sound_speed(g);
    let c_star = view.star.sound_speed(g);
    let theta = c_star / c;
    let mu2 = g.mu2();
    let e1 = 1.0 / (2.0 * mu2);
    let e2 = (1.0 + mu2) / mu2;
    let entropy_weight =
        (1.0 + mu2) / (1.0 + 2.0 * mu2) * theta.powf(e1) + mu2 / (1.0 + 2.0 * mu2) * theta.powf(e2);
    // T dS/dx and dc/dx of the undisturbed state
    let t_ds = (slopes.d_p_dx - c * c * slopes.d_rho_dx) / ((gm - 1.0) * init.rho);
    let dc = (gm * slopes.d_p_dx - c * c * slopes.d_rho_dx) / (2.0 * init.rho * c);
    (entropy_weight * t_ds, c * theta.powf(e1), 2.0 * dc / (gm - 1.0))
}

/// Coefficients `(a, b, d)` of `a Du/Dt + b Dp/Dt = d` for the wave on `view.side`.
pub fn lagrangian_coeffs(view: &WaveSideView, slopes: &SideSlopes, g: &GasParams) -> LagrangianCoeffs {
    let star = &view.star;
    let rho_c = star.rho * star.sound_speed(g);
    let zero = slopes.is_zero();
    match (view.wave, view.side) {
        (WaveKind::Rarefaction, Side::Left) => {
            let d = if zero {
                0.0
            } else {
                let (entropy, scale, dc_term) = centred_wave_factors(view, slopes, g);
                entropy - scale * (slopes.d_u_dx + dc_term)
            };
            LagrangianCoeffs {
                a: 1.0,
                b: 1.0 / rho_c,
                d,
            }
        }
        (WaveKind::Rarefaction, Side::Right) => {
            let d = if zero {
                0.0
            } else {
                let (entropy, scale, dc_term) = centred_wave_factors(view, slopes, g);
                entropy + scale * (slopes.d_u_dx - dc_term)
            };
            LagrangianCoeffs {
                a: 1.0,
                b: -1.0 / rho_c,
                d,
            }
        }
        (WaveKind::Shock, side) => {
            let left = side == Side::Left;
            let init = &view.init;
            let sigma = shock_speed(star.p, init, left, g);
            let rel = sigma - star.u;
            let c2 = g.gamma * star.p / star.rho;
            let (_, phi1) = wave_function(star.p, init, g);
            let (dphi_p, dphi_rho) = shock_jump_partials(star.p, init, g);
            let (drho, du, dp) = preshock_rates(init, slopes, sigma, g);
            if left {
                LagrangianCoeffs {
                    a: 1.0 - star.rho * rel * phi1,
                    b: -rel / (star.rho * c2) + phi1,
                    d: du - dphi_p * dp - dphi_rho * drho,
                }
            } else {
                LagrangianCoeffs {
                    a: 1.0 + star.rho * rel * phi1,
                    b: -rel / (star.rho * c2) - phi1,
                    d: du + dphi_p * dp + dphi_rho * drho,
                }
            }
        }
    }
}

/// Rewrites material-derivative coefficients in terms of partial time
/// derivatives at the t-axis, whose state is `axis`.
pub fn eulerian_coeffs(lag: &LagrangianCoeffs, axis: &PrimState, g: &GasParams) -> EulerianCoeffs {
    let c2 = g.gamma * axis.p / axis.rho;
    let u = axis.u;
    EulerianCoeffs {
        h: lag.a - axis.rho * u * lag.b,
        k: lag.b - u / (axis.rho * c2) * lag.a,
        q: (1.0 - u * u / c2) * lag.d,
    }
}

/// Density-derivative relation valid behind the wave on `view.side`.
pub fn density_coeffs(view: &WaveSideView, slopes: &SideSlopes, g: &GasParams) -> DensityCoeffs {
    let star = &view.star;
    let init = &view.init;
    let c2 = g.gamma * star.p / star.rho;
    let u = star.u;
    match view.wave {
        WaveKind::Rarefaction => {
            // entropy gradient carried into the star region by the fan
            let c2_init = g.gamma * init.p / init.rho;
            let ratio = (c2 / c2_init) * (star.rho / init.rho).powi(2);
            let k = ratio * (slopes.d_p_dx - c2_init * slopes.d_rho_dx);
            DensityCoeffs {
                g_rho: c2,
                g_u: 0.0,
                g_p: -1.0,
                f: u * k,
            }
        }
        WaveKind::Shock => {
            let left = view.side == Side::Left;
            let sigma = shock_speed(star.p, init, left, g);
            let rel = sigma - u;
            let (_, h1) = wave_density(star.p, init, g);
            let h_p = -h1 * star.p / init.p;
            let h_rho = star.rho / init.rho;
            let (drho, _, dp) = preshock_rates(init, slopes, sigma, g);
            let alpha = sigma / c2 - u * h1;
            let beta = u * h1 * star.rho * rel;
            let dd = 1.0 - u * u / c2;
            let norm = c2 / rel;
            DensityCoeffs {
                g_rho: c2,
                g_u: norm * (alpha * star.rho * u - beta) / dd,
                g_p: norm * (-alpha + beta * u / (star.rho * c2)) / dd,
                f: -norm * u * (h_p * dp + h_rho * drho),
            }
        }
    }
}

/// Computes every coefficient for one side with the Eulerian transform taken at `axis`.
pub fn side_coeffs(view: &WaveSideView, slopes: &SideSlopes, axis: &PrimState, g: &GasParams) -> GrpSideCoeffs {
    let lagrangian = lagrangian_coeffs(view, slopes, g);
    GrpSideCoeffs {
        lagrangian,
        eulerian: eulerian_coeffs(&lagrangian, axis, g),
        density: density_coeffs(view, slopes, g),
        wave: view.wave,
        side: view.side,
    }
}

/// Time derivatives of (rho, u, p) on the t-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrpSolution {
    pub riemann: RiemannSolution,
    pub axis_state: PrimState,
    pub d_rho_dt: f64,
    pub d_u_dt: f64,
    pub d_p_dt: f64,
    pub left: GrpSideCoeffs,
    pub right: GrpSideCoeffs,
}

/// Checks that the t-axis lies strictly between the two nonlinear waves.
pub fn check_axis_in_star(sol: &RiemannSolution) -> Result<()> {
    if sol.left_speeds.tail >= 0.0 || sol.left_speeds.head >= 0.0 {
        return Err(Error::SonicFan(format!(
            "left wave speeds ({}, {}) do not lie left of the t-axis",
            sol.left_speeds.head, sol.left_speeds.tail
        )));
    }
    if sol.right_speeds.tail <= 0.0 || sol.right_speeds.head <= 0.0 {
        return Err(Error::SonicFan(format!(
            "right wave speeds ({}, {}) do not lie right of the t-axis",
            sol.right_speeds.tail, sol.right_speeds.head
        )));
    }
    Ok(())
}

/// Uncoupled GRP: solves the 2x2 system for the velocity and pressure
/// derivatives and recovers the density derivative from the side of the
/// contact containing the t-axis.
pub fn solve_single_grp(
    left: &PrimState,
    right: &PrimState,
    slopes_l: &SideSlopes,
    slopes_r: &SideSlopes,
    g: &GasParams,
) -> Result<GrpSolution> {
    let sol = exact_rp(left, right, g)?;
    check_axis_in_star(&sol)?;
    let view_l = WaveSideView::from_solution(&sol, left, Side::Left);
    let view_r = WaveSideView::from_solution(&sol, right, Side::Right);
    let axis_on_left = sol.u_star >= 0.0;
    let axis = if axis_on_left { view_l.star } else { view_r.star };
    let cl = side_coeffs(&view_l, slopes_l, &axis, g);
    let cr = side_coeffs(&view_r, slopes_r, &axis, g);
    let (el, er) = (cl.eulerian, cr.eulerian);

    let det = el.h * er.k - er.h * el.k;
    let rho_c = axis.rho * axis.sound_speed(g);
    let scale = (el.h.abs() + el.k.abs() * rho_c) * (er.h.abs() + er.k.abs() * rho_c) / rho_c;
    if !(det.abs() >= 1e-14 * scale) {
        return Err(Error::SingularSystem { det });
    }
    let d_u_dt = (el.q * er.k - er.q * el.k) / det;
    let d_p_dt = (el.h * er.q - er.h * el.q) / det;
    let density = if axis_on_left { cl.density } else { cr.density };
    let d_rho_dt = density.solve(d_u_dt, d_p_dt);
    Ok(GrpSolution {
        riemann: sol,
        axis_state: axis,
        d_rho_dt,
        d_u_dt,
        d_p_dt,
        left: cl,
        right: cr,
    })
}

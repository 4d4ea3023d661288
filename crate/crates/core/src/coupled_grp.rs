//! Coupled GRP at the gas-generator interface.
//!
//! Unknowns are the time derivatives of the left velocity, the right velocity
//! and the common pressure at the interface. The first two rows come from the
//! outgoing nonlinear wave on each side, the third from differentiating the
//! momentum-jump condition in time with the left density derivative eliminated
//! through the density relation of the left wave.

use crate::coupled_rp::{solve_coupled_rp, CoupledStarState, CouplingData};
use crate::error::{Error, Result};
use crate::euler::{GasParams, PrimState};
use crate::grp::{side_coeffs, GrpSideCoeffs, Side, SideSlopes, WaveSideView};
use crate::riemann::{shock_speed, WaveKind};

/// Time derivatives of the interface traces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoupledDerivatives {
    pub d_ubar_dt: f64,
    pub d_u_dt: f64,
    pub d_pbar_dt: f64,
    pub d_p_dt: f64,
    pub d_rhobar_dt: f64,
    pub d_rho_dt: f64,
}

impl CoupledDerivatives {
    /// Rates of the left trace as a (rho, u, p) triple.
    pub fn left(&self) -> PrimState {
        PrimState::new(self.d_rhobar_dt, self.d_ubar_dt, self.d_pbar_dt)
    }

    pub fn right(&self) -> PrimState {
        PrimState::new(self.d_rho_dt, self.d_u_dt, self.d_p_dt)
    }
}

/// Row-major 3x3 matrix with its right-hand side in the last column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSystem {
    pub m: [[f64; 3]; 3],
    pub rhs: [f64; 3],
}

/// Builds the linear system for `(d ubar/dt, d u/dt, d p/dt)`.
pub fn assemble_matrix(
    left: &GrpSideCoeffs,
    right: &GrpSideCoeffs,
    star: &CoupledStarState,
    cpl: &CouplingData,
) -> CouplingSystem {
    let (el, er) = (left.eulerian, right.eulerian);
    let dens = left.density;
    let rho = star.left_trace.rho;
    let w = cpl.outtake / (rho * rho);
    CouplingSystem {
        m: [
            [el.h, 0.0, el.k],
            [0.0, er.h, er.k],
            [1.0 - w * dens.g_u / dens.g_rho, -1.0, -w * dens.g_p / dens.g_rho],
        ],
        rhs: [el.q, er.q, cpl.outtake_rate / rho - w * dens.f / dens.g_rho],
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant of the coupling matrix, rejected when small relative to the
/// product of the row norms.
pub fn det_check(sys: &CouplingSystem) -> Result<f64> {
    let det = det3(&sys.m);
    let scale: f64 = sys
        .m
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
        .product();
    if !(det.abs() >= 1e-12 * scale) {
        return Err(Error::SingularCoupling { det });
    }
    Ok(det)
}

fn cramer(sys: &CouplingSystem, det: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let mut m = sys.m;
        for i in 0..3 {
            m[i][j] = sys.rhs[i];
        }
        *o = det3(&m) / det;
    }
    out
}

/// Everything produced by one coupled GRP solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledGrpSolution {
    pub star: CoupledStarState,
    pub derivs: CoupledDerivatives,
    pub system: CouplingSystem,
    pub det: f64,
    pub left: GrpSideCoeffs,
    pub right: GrpSideCoeffs,
}

fn check_waves_outgoing(
    ul: &PrimState,
    ur: &PrimState,
    star: &CoupledStarState,
    g: &GasParams,
) -> Result<()> {
    let lt = &star.left_trace;
    let left_fast = match star.left_wave {
        WaveKind::Shock => shock_speed(lt.p, ul, true, g),
        WaveKind::Rarefaction => (ul.u - ul.sound_speed(g)).max(lt.u - lt.sound_speed(g)),
    };
    if left_fast >= 0.0 {
        return Err(Error::SonicFan(format!("left wave reaches speed {left_fast}")));
    }
    let rw = star.right_wave_state();
    let right_slow = match star.right_wave {
        WaveKind::Shock => shock_speed(rw.p, ur, false, g),
        WaveKind::Rarefaction => (ur.u + ur.sound_speed(g)).min(rw.u + rw.sound_speed(g)),
    };
    if right_slow <= 0.0 {
        return Err(Error::SonicFan(format!("right wave reaches speed {right_slow}")));
    }
    Ok(())
}

pub fn solve_coupled_grp(
    ul: &PrimState,
    ur: &PrimState,
    slopes_l: &SideSlopes,
    slopes_r: &SideSlopes,
    cpl: &CouplingData,
    g: &GasParams,
) -> Result<CoupledGrpSolution> {
    let star = solve_coupled_rp(ul, ur, cpl, g)?;
    check_waves_outgoing(ul, ur, &star, g)?;
    let view_l = WaveSideView {
        init: *ul,
        star: star.left_trace,
        wave: star.left_wave,
        side: Side::Left,
    };
    let view_r = WaveSideView {
        init: *ur,
        star: star.right_wave_state(),
        wave: star.right_wave,
        side: Side::Right,
    };
    let left = side_coeffs(&view_l, slopes_l, &star.left_trace, g);
    let right = side_coeffs(&view_r, slopes_r, &star.right_trace, g);
    let system = assemble_matrix(&left, &right, &star, cpl);
    let det = det_check(&system)?;
    let [d_ubar_dt, d_u_dt, d_p_dt] = cramer(&system, det);
    let d_rhobar_dt = left.density.solve(d_ubar_dt, d_p_dt);
    Ok(CoupledGrpSolution {
        star,
        derivs: CoupledDerivatives {
            d_ubar_dt,
            d_u_dt,
            d_pbar_dt: d_p_dt,
            d_p_dt,
            d_rhobar_dt,
            d_rho_dt: d_rhobar_dt,
        },
        system,
        det,
        left,
        right,
    })
}

/// Residuals of the differentiated coupling conditions, each scaled by the
/// magnitude of the terms it balances.
pub fn derivative_residual(star: &CoupledStarState, d: &CoupledDerivatives, cpl: &CouplingData) -> [f64; 3] {
    let rho = star.left_trace.rho;
    let r_p = (d.d_pbar_dt - d.d_p_dt).abs() / d.d_pbar_dt.abs().max(d.d_p_dt.abs()).max(f64::MIN_POSITIVE);
    let r_rho =
        (d.d_rhobar_dt - d.d_rho_dt).abs() / d.d_rhobar_dt.abs().max(d.d_rho_dt.abs()).max(f64::MIN_POSITIVE);
    let terms = [
        d.d_ubar_dt,
        d.d_u_dt,
        cpl.outtake_rate / rho,
        cpl.outtake / (rho * rho) * d.d_rhobar_dt,
    ];
    let mag = terms.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let r_u = (terms[0] - terms[1] - terms[2] + terms[3]).abs() / mag.max(f64::MIN_POSITIVE);
    [r_p, r_rho, r_u]
}

/// Linear-in-time interface traces on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceBoundarySeries {
    pub t0: f64,
    pub t1: f64,
    pub left_star: PrimState,
    pub right_star: PrimState,
    pub left_deriv: PrimState,
    pub right_deriv: PrimState,
}

fn linear(s: &PrimState, d: &PrimState, dt: f64) -> PrimState {
    PrimState::new(s.rho + dt * d.rho, s.u + dt * d.u, s.p + dt * d.p)
}

impl InterfaceBoundarySeries {
    /// Constant traces, used where no derivative information is available.
    pub fn constant(left: PrimState, right: PrimState, t0: f64, t1: f64) -> Result<Self> {
        boundary_series(
            &CoupledStarState {
                left_trace: left,
                right_trace: right,
                left_wave: WaveKind::Rarefaction,
                right_wave: WaveKind::Rarefaction,
                right_wave_rho: right.rho,
            },
            &CoupledDerivatives::default(),
            t0,
            t1,
        )
    }

    pub fn left_at(&self, t: f64) -> PrimState {
        linear(&self.left_star, &self.left_deriv, t - self.t0)
    }

    pub fn right_at(&self, t: f64) -> PrimState {
        linear(&self.right_star, &self.right_deriv, t - self.t0)
    }

    /// Fails unless `[t, t_end]` lies inside the window (up to round-off).
    pub fn check_covers(&self, t: f64, t_end: f64) -> Result<()> {
        let eps = 1e-12 * self.t1.abs().max(1.0);
        if t < self.t0 - eps || t_end > self.t1 + eps || t_end < t {
            return Err(Error::WindowExceeded {
                t,
                t_end,
                t0: self.t0,
                t1: self.t1,
            });
        }
        Ok(())
    }
}

pub fn boundary_series(
    star: &CoupledStarState,
    derivs: &CoupledDerivatives,
    t0: f64,
    t1: f64,
) -> Result<InterfaceBoundarySeries> {
    if !(t1 > t0) {
        return Err(Error::Validation(format!("empty boundary window [{t0}, {t1}]")));
    }
    Ok(InterfaceBoundarySeries {
        t0,
        t1,
        left_star: star.left_trace,
        right_star: star.right_trace,
        left_deriv: derivs.left(),
        right_deriv: derivs.right(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::solve_single_grp;
    use proptest::prelude::*;

    const P0: f64 = 146820.4;

    /// Gaussian elimination with partial pivoting.
    fn gauss(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
                .unwrap();
            m.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..3 {
                let f = m[row][col] / m[col][col];
                for k in col..3 {
                    m[row][k] -= f * m[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for i in (0..3).rev() {
            let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / m[i][i];
        }
        x
    }

    #[test]
    fn steady_state_has_zero_derivatives() {
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, P0);
        let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &CouplingData::default(), &g)
            .unwrap();
        assert_eq!(sol.derivs, CoupledDerivatives::default());
        assert_eq!(sol.system.rhs, [0.0; 3]);
        assert_eq!(sol.system.m[2], [1.0, -1.0, 0.0]);
    }

    #[test]
    fn symmetric_rarefaction_determinant() {
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, P0);
        let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &CouplingData::default(), &g)
            .unwrap();
        let c = s.sound_speed(&g);
        let closed = -2.0 * (c * c - 250.0 * 250.0) / c.powi(3);
        assert!((sol.det - closed).abs() < 1e-12 * closed.abs());
        assert!((sol.det + 3.0700e-3).abs() < 1e-4 * 3.07e-3);
    }

    #[test]
    fn outtake_term_in_determinant() {
        // with the left density relation g = (c^2, 0, -1) the outtake adds
        // +E/(rho c)^2 h_L h_R to the determinant
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, P0);
        let cpl = CouplingData::new(5.0, 0.0).unwrap();
        let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &cpl, &g).unwrap();
        let (el, er) = (sol.left.eulerian, sol.right.eulerian);
        let lt = sol.star.left_trace;
        let rc = lt.rho * lt.sound_speed(&g);
        let expect = -el.k * er.h + el.h * er.k + cpl.outtake / (rc * rc) * el.h * er.h;
        assert!((sol.det - expect).abs() < 1e-10 * expect.abs());
        assert!(sol.det < 0.0);
        assert!((sol.system.m[2][2] - cpl.outtake / (rc * rc)).abs() < 1e-18);
    }

    #[test]
    fn ramp_onset_matches_linear_algebra() {
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, P0);
        let cpl = CouplingData::new(0.0, 3.0).unwrap();
        let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &cpl, &g).unwrap();
        assert_eq!(sol.system.rhs, [0.0, 0.0, 3.0]);
        let x = gauss(sol.system.m, sol.system.rhs);
        let d = sol.derivs;
        assert!((d.d_ubar_dt - x[0]).abs() < 1e-9 * x[0].abs());
        assert!((d.d_u_dt - x[1]).abs() < 1e-9 * x[1].abs());
        assert!((d.d_p_dt - x[2]).abs() < 1e-9 * x[2].abs());
        assert!((d.d_ubar_dt - d.d_u_dt - 3.0).abs() < 1e-10);
        // outtake ramp lowers the pressure
        assert!(d.d_p_dt < 0.0);
    }

    #[test]
    fn series_taylor_residual_is_second_order() {
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, P0);
        let cpl = CouplingData::new(0.0, 3.0).unwrap();
        let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &cpl, &g).unwrap();
        let ser = boundary_series(&sol.star, &sol.derivs, 0.0, 1e-2).unwrap();
        assert_eq!(ser.left_at(0.0), sol.star.left_trace);
        let psi = |dt: f64| {
            let l = ser.left_at(dt);
            let r = ser.right_at(dt);
            l.u - r.u - 3.0 * dt / l.rho
        };
        let r1 = psi(1e-3).abs();
        let r2 = psi(5e-4).abs();
        assert!(r1 < 1e-4);
        assert!((r1 / r2 - 4.0).abs() < 0.1, "ratio {}", r1 / r2);
    }

    #[test]
    fn constant_series() {
        let s = PrimState::new(1.0, 2.0, 3.0);
        let ser = InterfaceBoundarySeries::constant(s, s, 0.0, 1.0).unwrap();
        assert_eq!(ser.left_at(0.7), s);
        assert!(ser.check_covers(0.2, 0.9).is_ok());
        assert!(matches!(ser.check_covers(0.2, 1.1), Err(Error::WindowExceeded { .. })));
        assert!(InterfaceBoundarySeries::constant(s, s, 1.0, 1.0).is_err());
    }

    #[test]
    fn singular_guard() {
        let sys = CouplingSystem {
            m: [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 2.0]],
            rhs: [0.0; 3],
        };
        assert!(matches!(det_check(&sys), Err(Error::SingularCoupling { .. })));
    }

    #[test]
    fn sonic_limit_determinant_vanishes() {
        let g = GasParams::air();
        let mut last = f64::NEG_INFINITY;
        for u in [400.0, 440.0, 450.0, 453.0] {
            let s = PrimState::new(1.0, u, P0);
            let sol = solve_coupled_grp(&s, &s, &SideSlopes::ZERO, &SideSlopes::ZERO, &CouplingData::default(), &g);
            let det = sol.unwrap().det;
            assert!(det < 0.0 && det > last);
            last = det;
        }
        assert!(last > -1e-4);
    }

    fn slopes() -> impl Strategy<Value = SideSlopes> {
        (-1e-3f64..1e-3, -0.5f64..0.5, -200.0f64..200.0).prop_map(|(a, b, c)| SideSlopes::new(a, b, c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reduces_to_single_grp_without_outtake(
            rl in 0.6f64..1.6, ul in 20.0f64..200.0, pl in 0.8f64..1.2,
            rr in 0.6f64..1.6, ur in 20.0f64..200.0, pr in 0.8f64..1.2,
            sl in slopes(), sr in slopes(),
        ) {
            let g = GasParams::air();
            let l = PrimState::new(rl, ul, pl * P0);
            let r = PrimState::new(rr, ur, pr * P0);
            let c = solve_coupled_grp(&l, &r, &sl, &sr, &CouplingData::default(), &g);
            let s = solve_single_grp(&l, &r, &sl, &sr, &g);
            if let (Ok(c), Ok(s)) = (c, s) {
                let tol = |a: f64, b: f64, sc: f64| (a - b).abs() <= 1e-10 * (a.abs().max(b.abs()) + sc);
                prop_assert!(tol(c.derivs.d_u_dt, s.d_u_dt, 1e-3 * (s.d_p_dt.abs() / (rl * 400.0))));
                prop_assert!(tol(c.derivs.d_ubar_dt, s.d_u_dt, 1e-3 * (s.d_p_dt.abs() / (rl * 400.0))));
                prop_assert!(tol(c.derivs.d_p_dt, s.d_p_dt, s.d_u_dt.abs() * rl * 400.0));
                prop_assert!(tol(c.derivs.d_rho_dt, s.d_rho_dt, s.d_p_dt.abs() / 1e5));
            }
        }

        #[test]
        fn derivative_identities_hold(
            rl in 0.6f64..1.6, ul in 20.0f64..200.0, pl in 0.8f64..1.2,
            rr in 0.6f64..1.6, ur in 20.0f64..200.0, pr in 0.8f64..1.2,
            e in 0.0f64..20.0, er in -100.0f64..100.0,
            sl in slopes(), sr in slopes(),
        ) {
            let g = GasParams::air();
            let l = PrimState::new(rl, ul, pl * P0);
            let r = PrimState::new(rr, ur, pr * P0);
            let cpl = CouplingData::new(e, er).unwrap();
            if let Ok(sol) = solve_coupled_grp(&l, &r, &sl, &sr, &cpl, &g) {
                let res = derivative_residual(&sol.star, &sol.derivs, &cpl);
                prop_assert!(res.iter().all(|x| *x < 1e-10), "{:?}", res);
                if sol.star.left_wave == WaveKind::Rarefaction {
                    prop_assert!(sol.det < 0.0);
                }
            }
        }
    }
}

//! Exact Riemann solver for ideal-gas Euler and the Lax-curve parametrizations
//! it is built on.

use crate::error::{Error, Result};
use crate::euler::{GasParams, PrimState};

/// Type of a genuinely nonlinear wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Which Lax curve is followed from a base state.
///
/// `Forward1` starts at the state left of a 1-wave and returns the state behind it,
/// `Backward3` starts at the state right of a 3-wave and returns the state in front of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxCurveSide {
    Forward1,
    Backward3,
}

impl LaxCurveSide {
    pub fn family(self) -> u8 {
        match self {
            LaxCurveSide::Forward1 => 1,
            LaxCurveSide::Backward3 => 3,
        }
    }
}

/// Head/tail speeds of a rarefaction, or the shock speed twice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    pub head: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_l: f64,
    pub rho_star_r: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
    pub left_speeds: WaveSpeeds,
    pub right_speeds: WaveSpeeds,
}

impl RiemannSolution {
    pub fn star_left(&self) -> PrimState {
        PrimState::new(self.rho_star_l, self.u_star, self.p_star)
    }

    pub fn star_right(&self) -> PrimState {
        PrimState::new(self.rho_star_r, self.u_star, self.p_star)
    }
}

/// Velocity change across a 1- or 3-wave connecting `base` to pressure `p`
/// (Toro's f_K), together with its derivative in `p`.
pub fn wave_function(p: f64, base: &PrimState, g: &GasParams) -> (f64, f64) {
    let gm = g.gamma;
    if p > base.p {
        let a = 2.0 / ((gm + 1.0) * base.rho);
        let b = g.mu2() * base.p;
        let q = (a / (p + b)).sqrt();
        let f = (p - base.p) * q;
        let df = q * (1.0 - 0.5 * (p - base.p) / (p + b));
        (f, df)
    } else {
        let c = base.sound_speed(g);
        let z = (gm - 1.0) / (2.0 * gm);
        let ratio = p / base.p;
        let f = 2.0 * c / (gm - 1.0) * (ratio.powf(z) - 1.0);
        let df = ratio.powf(-(gm + 1.0) / (2.0 * gm)) / (base.rho * c);
        (f, df)
    }
}

/// Density behind a wave from `base` at pressure `p` and its derivative in `p`.
pub fn wave_density(p: f64, base: &PrimState, g: &GasParams) -> (f64, f64) {
    if p > base.p {
        let mu2 = g.mu2();
        let r = p / base.p;
        let den = mu2 * r + 1.0;
        let rho = base.rho * (r + mu2) / den;
        let drho = base.rho / base.p * (1.0 - mu2 * mu2) / (den * den);
        (rho, drho)
    } else {
        let rho = base.rho * (p / base.p).powf(1.0 / g.gamma);
        (rho, rho / (g.gamma * p))
    }
}

/// Shock speed of a 1-shock (`left = true`) or 3-shock running into `base`.
pub fn shock_speed(p_star: f64, base: &PrimState, left: bool, g: &GasParams) -> f64 {
    let c = base.sound_speed(g);
    let m = c
        * ((g.gamma + 1.0) / (2.0 * g.gamma) * p_star / base.p + (g.gamma - 1.0) / (2.0 * g.gamma))
            .sqrt();
    if left {
        base.u - m
    } else {
        base.u + m
    }
}

/// State on the chosen Lax curve through `base` at pressure `p`.
pub fn lax_curve_state(base: &PrimState, p: f64, side: LaxCurveSide, g: &GasParams) -> Result<PrimState> {
    base.check()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::VacuumState(format!("Lax curve evaluated at p = {p:e}")));
    }
    let (f, _) = wave_function(p, base, g);
    let (rho, _) = wave_density(p, base, g);
    let u = match side {
        LaxCurveSide::Forward1 => base.u - f,
        LaxCurveSide::Backward3 => base.u + f,
    };
    if !(rho > 0.0) {
        return Err(Error::VacuumState(format!("density {rho:e} on Lax curve")));
    }
    Ok(PrimState::new(rho, u, p))
}

const MAX_ITER: usize = 100;

/// Exact solution of the Riemann problem between `left` and `right`.
pub fn exact_rp(left: &PrimState, right: &PrimState, g: &GasParams) -> Result<RiemannSolution> {
    left.check()?;
    right.check()?;
    let du = right.u - left.u;
    let pressure_fn = |p: f64| {
        let (fl, dfl) = wave_function(p, left, g);
        let (fr, dfr) = wave_function(p, right, g);
        (fl + fr + du, dfl + dfr)
    };

    let p_min = left.p.min(right.p);
    let p_max = left.p.max(right.p);
    let mut lo = 1e-10 * p_min;
    let mut hi = 50.0 * p_max;
    let (f_lo, _) = pressure_fn(lo);
    if f_lo > 0.0 {
        return Err(Error::VacuumState(format!(
            "rarefactions separate {left:?} and {right:?}"
        )));
    }
    let (f_hi, _) = pressure_fn(hi);
    if f_hi < 0.0 {
        return Err(Error::NoConvergence(format!(
            "star pressure above bracket {hi:e}"
        )));
    }

    // two-rarefaction initial guess
    let z = (g.gamma - 1.0) / (2.0 * g.gamma);
    let cl = left.sound_speed(g);
    let cr = right.sound_speed(g);
    let num = cl + cr - 0.5 * (g.gamma - 1.0) * du;
    let den = cl / left.p.powf(z) + cr / right.p.powf(z);
    let mut p = if num > 0.0 { (num / den).powf(1.0 / z) } else { lo };
    p = p.clamp(lo, hi);

    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (f, df) = pressure_fn(p);
        let ul = left.u - wave_function(p, left, g).0;
        if f.abs() < 1e-12 * ul.abs().max(1.0) {
            converged = true;
            break;
        }
        if f < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo) <= 4.0 * f64::EPSILON * hi {
            converged = true;
            p = next;
            break;
        }
        p = next;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "exact Riemann solver after {MAX_ITER} iterations"
        )));
    }

    let (fl, _) = wave_function(p, left, g);
    let (fr, _) = wave_function(p, right, g);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    let (rho_star_l, _) = wave_density(p, left, g);
    let (rho_star_r, _) = wave_density(p, right, g);

    let (left_wave, left_speeds) = if p > left.p {
        let s = shock_speed(p, left, true, g);
        (WaveKind::Shock, WaveSpeeds { head: s, tail: s })
    } else {
        let c_star = cl * (p / left.p).powf(z);
        (
            WaveKind::Rarefaction,
            WaveSpeeds {
                head: left.u - cl,
                tail: u_star - c_star,
            },
        )
    };
    let (right_wave, right_speeds) = if p > right.p {
        let s = shock_speed(p, right, false, g);
        (WaveKind::Shock, WaveSpeeds { head: s, tail: s })
    } else {
        let c_star = cr * (p / right.p).powf(z);
        (
            WaveKind::Rarefaction,
            WaveSpeeds {
                head: right.u + cr,
                tail: u_star + c_star,
            },
        )
    };

    Ok(RiemannSolution {
        p_star: p,
        u_star,
        rho_star_l,
        rho_star_r,
        left_wave,
        right_wave,
        left_speeds,
        right_speeds,
    })
}

/// Self-similar solution on the ray `x / t = xi`.
pub fn sample_fan(sol: &RiemannSolution, left: &PrimState, right: &PrimState, xi: f64, g: &GasParams) -> PrimState {
    let gm = g.gamma;
    if xi <= sol.u_star {
        match sol.left_wave {
            WaveKind::Shock => {
                if xi <= sol.left_speeds.head {
                    *left
                } else {
                    sol.star_left()
                }
            }
            WaveKind::Rarefaction => {
                if xi <= sol.left_speeds.head {
                    *left
                } else if xi >= sol.left_speeds.tail {
                    sol.star_left()
                } else {
                    let cl = left.sound_speed(g);
                    let c = 2.0 / (gm + 1.0) * (cl + 0.5 * (gm - 1.0) * (left.u - xi));
                    let u = 2.0 / (gm + 1.0) * (cl + 0.5 * (gm - 1.0) * left.u + xi);
                    let ratio = c / cl;
                    PrimState::new(
                        left.rho * ratio.powf(2.0 / (gm - 1.0)),
                        u,
                        left.p * ratio.powf(2.0 * gm / (gm - 1.0)),
                    )
                }
            }
        }
    } else {
        match sol.right_wave {
            WaveKind::Shock => {
                if xi >= sol.right_speeds.head {
                    *right
                } else {
                    sol.star_right()
                }
            }
            WaveKind::Rarefaction => {
                if xi >= sol.right_speeds.head {
                    *right
                } else if xi <= sol.right_speeds.tail {
                    sol.star_right()
                } else {
                    let cr = right.sound_speed(g);
                    let c = 2.0 / (gm + 1.0) * (cr - 0.5 * (gm - 1.0) * (right.u - xi));
                    let u = 2.0 / (gm + 1.0) * (-cr + 0.5 * (gm - 1.0) * right.u + xi);
                    let ratio = c / cr;
                    PrimState::new(
                        right.rho * ratio.powf(2.0 / (gm - 1.0)),
                        u,
                        right.p * ratio.powf(2.0 * gm / (gm - 1.0)),
                    )
                }
            }
        }
    }
}

/// Godunov state on the t-axis; identical states short-circuit the solver.
pub fn interface_state(left: &PrimState, right: &PrimState, g: &GasParams) -> Result<PrimState> {
    if left == right {
        return Ok(*left);
    }
    let sol = exact_rp(left, right, g)?;
    Ok(sample_fan(&sol, left, right, 0.0, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SOD_L: PrimState = PrimState::new(1.0, 0.0, 1.0);
    const SOD_R: PrimState = PrimState::new(0.125, 0.0, 0.1);

    /// Plain bisection on the pressure function, kept independent of the Newton path.
    fn bisection_star(l: &PrimState, r: &PrimState, g: &GasParams) -> (f64, f64) {
        let gm = g.gamma;
        let f = |p: f64, s: &PrimState| -> f64 {
            let c = (gm * s.p / s.rho).sqrt();
            if p > s.p {
                (p - s.p) * (2.0 / ((gm + 1.0) * s.rho) / (p + (gm - 1.0) / (gm + 1.0) * s.p)).sqrt()
            } else {
                2.0 * c / (gm - 1.0) * ((p / s.p).powf((gm - 1.0) / (2.0 * gm)) - 1.0)
            }
        };
        let (mut lo, mut hi) = (1e-8, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid, l) + f(mid, r) + r.u - l.u > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p = 0.5 * (lo + hi);
        (p, 0.5 * (l.u + r.u) + 0.5 * (f(p, r) - f(p, l)))
    }

    #[test]
    fn sod_star_state() {
        let g = GasParams::air();
        let sol = exact_rp(&SOD_L, &SOD_R, &g).unwrap();
        let (p_ref, u_ref) = bisection_star(&SOD_L, &SOD_R, &g);
        assert!((sol.p_star - p_ref).abs() < 1e-10);
        assert!((sol.u_star - u_ref).abs() < 1e-10);
        assert!((sol.p_star - 0.30313).abs() < 1e-4);
        assert!((sol.u_star - 0.92745).abs() < 1e-4);
        assert_eq!(sol.left_wave, WaveKind::Rarefaction);
        assert_eq!(sol.right_wave, WaveKind::Shock);
    }

    #[test]
    fn identical_states() {
        let g = GasParams::air();
        let s = PrimState::new(1.0, 250.0, 146820.4);
        let sol = exact_rp(&s, &s, &g).unwrap();
        assert!((sol.p_star - s.p).abs() < 1e-9 * s.p);
        assert!((sol.u_star - 250.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_expansion() {
        let g = GasParams::air();
        let l = PrimState::new(1.0, -1.0, 1.0);
        let r = PrimState::new(1.0, 1.0, 1.0);
        let sol = exact_rp(&l, &r, &g).unwrap();
        let (p_ref, _) = bisection_star(&l, &r, &g);
        assert!(sol.u_star.abs() < 1e-12);
        assert!(sol.p_star < 1.0);
        assert!((sol.p_star - p_ref).abs() < 1e-10);
    }

    #[test]
    fn vacuum_detected() {
        let g = GasParams::air();
        let l = PrimState::new(1.0, -20.0, 1.0);
        let r = PrimState::new(1.0, 20.0, 1.0);
        assert!(matches!(exact_rp(&l, &r, &g), Err(Error::VacuumState(_))));
    }

    #[test]
    fn lax_curve_examples() {
        let g = GasParams::air();
        let base = PrimState::new(1.0, 0.0, 1.0);
        for side in [LaxCurveSide::Forward1, LaxCurveSide::Backward3] {
            let s = lax_curve_state(&base, 1.0, side, &g).unwrap();
            assert_eq!(s, base);
        }
        let sol = exact_rp(&SOD_L, &SOD_R, &g).unwrap();
        let s = lax_curve_state(&SOD_L, sol.p_star, LaxCurveSide::Forward1, &g).unwrap();
        assert!((s.u - 0.92745).abs() < 1e-4 && (s.rho - 0.42632).abs() < 1e-4);
        let s = lax_curve_state(&SOD_R, sol.p_star, LaxCurveSide::Backward3, &g).unwrap();
        assert!((s.u - 0.92745).abs() < 1e-4);
        assert!(lax_curve_state(&base, 0.0, LaxCurveSide::Forward1, &g).is_err());
    }

    #[test]
    fn sample_sod() {
        let g = GasParams::air();
        let sol = exact_rp(&SOD_L, &SOD_R, &g).unwrap();
        let s = sample_fan(&sol, &SOD_L, &SOD_R, 0.0, &g);
        assert!((s.rho - 0.42632).abs() < 1e-4);
        assert!((s.u - 0.92745).abs() < 1e-4);
        assert!((s.p - 0.30313).abs() < 1e-4);
        assert_eq!(sample_fan(&sol, &SOD_L, &SOD_R, -10.0, &g), SOD_L);
        assert_eq!(sample_fan(&sol, &SOD_L, &SOD_R, 10.0, &g), SOD_R);
        let same = PrimState::new(2.0, 3.0, 4.0);
        let sol = exact_rp(&same, &same, &g).unwrap();
        for xi in [-5.0, 0.0, 3.0, 7.0] {
            let s = sample_fan(&sol, &same, &same, xi, &g);
            assert!((s.rho - 2.0).abs() < 1e-9 && (s.u - 3.0).abs() < 1e-9 && (s.p - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fan_is_continuous_through_rarefaction() {
        let g = GasParams::air();
        let sol = exact_rp(&SOD_L, &SOD_R, &g).unwrap();
        let head = sample_fan(&sol, &SOD_L, &SOD_R, sol.left_speeds.head + 1e-12, &g);
        let tail = sample_fan(&sol, &SOD_L, &SOD_R, sol.left_speeds.tail - 1e-12, &g);
        assert!((head.p - SOD_L.p).abs() < 1e-9);
        assert!((tail.p - sol.p_star).abs() < 1e-9);
        assert!((tail.rho - sol.rho_star_l).abs() < 1e-9);
    }

    #[test]
    fn lax_curve_second_order_contact() {
        // u(p) on the 1-curve is C2 at the base pressure
        let g = GasParams::air();
        let base = PrimState::new(1.3, 0.4, 2.0);
        let u = |p: f64| lax_curve_state(&base, p, LaxCurveSide::Forward1, &g).unwrap().u;
        let h = 1e-3;
        let p0 = base.p;
        let d1_minus = (u(p0) - u(p0 - h)) / h;
        let d1_plus = (u(p0 + h) - u(p0)) / h;
        let d2_minus = (u(p0) - 2.0 * u(p0 - h) + u(p0 - 2.0 * h)) / (h * h);
        let d2_plus = (u(p0 + 2.0 * h) - 2.0 * u(p0 + h) + u(p0)) / (h * h);
        // one-sided differences carry O(h) bias; extrapolate to the base point
        let d1m = d1_minus + 0.5 * h * d2_minus;
        let d1p = d1_plus - 0.5 * h * d2_plus;
        assert!((d1m - d1p).abs() < 1e-5 * d1m.abs());
        let d2_exact_minus = {
            let hh = 1e-4;
            (u(p0) - 2.0 * u(p0 - hh) + u(p0 - 2.0 * hh)) / (hh * hh)
        };
        let d2_exact_plus = {
            let hh = 1e-4;
            (u(p0 + 2.0 * hh) - 2.0 * u(p0 + hh) + u(p0)) / (hh * hh)
        };
        assert!((d2_exact_minus - d2_exact_plus).abs() < 2e-3 * d2_exact_minus.abs());
    }

    proptest! {
        #[test]
        fn star_positivity_and_far_field(
            rl in 0.1f64..10.0, ul in -1.0f64..1.0, pl in 0.1f64..10.0,
            rr in 0.1f64..10.0, ur in -1.0f64..1.0, pr in 0.1f64..10.0,
        ) {
            let g = GasParams::air();
            let l = PrimState::new(rl, ul, pl);
            let r = PrimState::new(rr, ur, pr);
            let sol = exact_rp(&l, &r, &g).unwrap();
            prop_assert!(sol.p_star > 0.0 && sol.rho_star_l > 0.0 && sol.rho_star_r > 0.0);
            let (fl, _) = wave_function(sol.p_star, &l, &g);
            let (fr, _) = wave_function(sol.p_star, &r, &g);
            let mismatch = (l.u - fl) - (r.u + fr);
            prop_assert!(mismatch.abs() < 1e-12 * sol.u_star.abs().max(1.0) * 10.0);
            prop_assert_eq!(sample_fan(&sol, &l, &r, -1e6, &g), l);
            prop_assert_eq!(sample_fan(&sol, &l, &r, 1e6, &g), r);
            if sol.left_wave == WaveKind::Shock {
                prop_assert!(sol.left_speeds.head < sol.u_star);
            }
        }
    }
}

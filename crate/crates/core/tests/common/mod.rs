#![allow(dead_code)]

use cgrp::coupled_grp::solve_coupled_grp;
use cgrp::coupled_rp::{solve_coupled_rp, CouplingData};
use cgrp::euler::{cons_to_prim, flux, ConsState, GasParams, PrimState};
use cgrp::grp::{solve_single_grp, SideSlopes};
use cgrp::riemann::{interface_state, WaveKind};
use rand::Rng;

/// Piecewise-linear initial data with a jump at x = 0.
#[derive(Debug, Clone, Copy)]
pub struct LinearJump {
    pub left: PrimState,
    pub right: PrimState,
    pub slopes_l: SideSlopes,
    pub slopes_r: SideSlopes,
}

impl LinearJump {
    pub fn at(&self, x: f64) -> PrimState {
        let (s, d) = if x < 0.0 {
            (self.left, self.slopes_l)
        } else {
            (self.right, self.slopes_r)
        };
        PrimState::new(s.rho + x * d.d_rho_dx, s.u + x * d.d_u_dx, s.p + x * d.d_p_dx)
    }
}

fn add(a: ConsState, b: ConsState, s: f64) -> ConsState {
    ConsState {
        rho: a.rho + s * b.rho,
        mom: a.mom + s * b.mom,
        en: a.en + s * b.en,
    }
}

/// First-order Godunov evolution of `data` on `[-half_width, half_width]`
/// with `2 * n_half` cells. With `outtake = Some((e0, e1))` the face at x = 0
/// carries the coupling with outtake `e0 + e1 t`, otherwise it is an ordinary
/// face. Returns the (left, right) face traces at each requested time, or
/// `None` if an interface solve fails along the way.
pub fn godunov_traces(
    data: &LinearJump,
    outtake: Option<(f64, f64)>,
    half_width: f64,
    n_half: usize,
    times: &[f64],
    g: &GasParams,
) -> Option<Vec<(PrimState, PrimState)>> {
    let dx = half_width / n_half as f64;
    let n = 2 * n_half;
    let mut cells: Vec<ConsState> = (0..n)
        .map(|i| {
            let x = -half_width + (i as f64 + 0.5) * dx;
            data.at(x).to_cons(g)
        })
        .collect();
    let mut prims: Vec<PrimState> = cells.iter().map(|c| cons_to_prim(c, g).ok()).collect::<Option<_>>()?;
    let centre = |prims: &[PrimState], t: f64| -> Option<(PrimState, PrimState)> {
        let (l, r) = (prims[n_half - 1], prims[n_half]);
        match outtake {
            None => {
                let s = interface_state(&l, &r, g).ok()?;
                Some((s, s))
            }
            Some((e0, e1)) => {
                let st = solve_coupled_rp(&l, &r, &CouplingData::new(e0 + e1 * t, e1).ok()?, g).ok()?;
                Some((st.left_trace, st.right_trace))
            }
        }
    };
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut fluxes = vec![ConsState::default(); n + 1];
    for &target in times {
        while t < target {
            let lam = prims.iter().map(|s| s.u.abs() + s.sound_speed(g)).fold(0.0, f64::max);
            let mut dt = 0.9 * dx / lam;
            if t + dt > target {
                dt = target - t;
            }
            let (tl, tr) = centre(&prims, t)?;
            for f in 1..n {
                fluxes[f] = if f == n_half {
                    flux(&tl, g)
                } else {
                    flux(&interface_state(&prims[f - 1], &prims[f], g).ok()?, g)
                };
            }
            fluxes[0] = flux(&prims[0], g);
            fluxes[n] = flux(&prims[n - 1], g);
            let right_flux = flux(&tr, g);
            for i in 0..n {
                let fin = if i == n_half { right_flux } else { fluxes[i] };
                let d = add(fin, fluxes[i + 1], -1.0);
                cells[i] = add(cells[i], d, dt / dx);
                prims[i] = cons_to_prim(&cells[i], g).ok()?;
            }
            t += dt;
        }
        out.push(centre(&prims, t)?);
    }
    Some(out)
}

/// Time derivative of the traces at t = 0 from the exact t = 0 traces and the
/// Godunov traces at `tau` and `2 tau` (Richardson-extrapolated differences).
pub fn fd_trace_rates(
    data: &LinearJump,
    outtake: Option<(f64, f64)>,
    at_zero: (PrimState, PrimState),
    tau: f64,
    half_width: f64,
    n_half: usize,
    g: &GasParams,
) -> Option<(PrimState, PrimState)> {
    let tr = godunov_traces(data, outtake, half_width, n_half, &[tau, 2.0 * tau], g)?;
    let rate = |s0: PrimState, s1: PrimState, s2: PrimState| {
        let d = |a: f64, b: f64, c: f64| 2.0 * (b - a) / tau - (c - a) / (2.0 * tau);
        PrimState::new(d(s0.rho, s1.rho, s2.rho), d(s0.u, s1.u, s2.u), d(s0.p, s1.p, s2.p))
    };
    Some((
        rate(at_zero.0, tr[0].0, tr[1].0),
        rate(at_zero.1, tr[0].1, tr[1].1),
    ))
}

/// Natural magnitude of each rate for the given data: (rho_t, u_t, p_t).
pub fn rate_scales(data: &LinearJump, g: &GasParams) -> [f64; 3] {
    let mut sc = [0.0f64; 3];
    for (s, d) in [(data.left, data.slopes_l), (data.right, data.slopes_r)] {
        let c = s.sound_speed(g);
        let (dr, du, dp) = (d.d_rho_dx.abs(), d.d_u_dx.abs(), d.d_p_dx.abs());
        sc[0] = sc[0].max(c * dr + s.rho * du + dp / c);
        sc[1] = sc[1].max(c * du + dp / s.rho);
        sc[2] = sc[2].max(c * dp + s.rho * c * c * du);
    }
    sc
}

/// Random slopes of moderate size in units where rho, p ~ 1.
pub fn random_slopes<R: Rng>(rng: &mut R) -> SideSlopes {
    SideSlopes::new(
        rng.gen_range(-0.6..0.6),
        rng.gen_range(-0.6..0.6),
        rng.gen_range(-0.6..0.6),
    )
}

/// Random jump data for which the t-axis sits well inside the intermediate
/// region: both nonlinear waves clear of the axis and the contact (or, when
/// coupled, the right trace) moving right at a healthy speed.
pub fn random_jump<R: Rng>(rng: &mut R) -> LinearJump {
    let rho_l = rng.gen_range(0.6..1.4);
    let p_l = rng.gen_range(0.6..1.4);
    let u_l = rng.gen_range(0.45..0.8);
    LinearJump {
        left: PrimState::new(rho_l, u_l, p_l),
        right: PrimState::new(
            rng.gen_range(0.6..1.4),
            u_l + rng.gen_range(-0.3..0.3),
            p_l * rng.gen_range(0.6..1.6),
        ),
        slopes_l: random_slopes(rng),
        slopes_r: random_slopes(rng),
    }
}

/// Derivatives from the GRP solver next to the finite-difference estimate.
/// Components: left trace (rho, u, p), right trace u.
#[derive(Debug, Clone)]
pub struct RateComparison {
    pub coupled: bool,
    pub waves: (WaveKind, WaveKind),
    pub got: [f64; 4],
    pub fd: [f64; 4],
    pub scale: [f64; 4],
}

impl RateComparison {
    /// Worst error in units of the tolerance `max(0.05 |fd|, 0.01 scale)`.
    pub fn worst(&self) -> f64 {
        (0..4)
            .map(|i| (self.got[i] - self.fd[i]).abs() / (0.05 * self.fd[i].abs()).max(0.01 * self.scale[i]))
            .fold(0.0, f64::max)
    }
}

const FD_TAU: f64 = 0.04;
const FD_HALF_WIDTH: f64 = 0.22;
const FD_CELLS: usize = 880;

/// Solves the GRP (single or coupled with outtake `e0 + e1 t`) and estimates
/// the same trace rates from Godunov runs, extrapolated in both the time
/// offset and the cell size. `None` when the solver rejects the data or the
/// data leave the subsonic regime during the oracle run.
pub fn compare_with_fd(data: &LinearJump, outtake: Option<(f64, f64)>, g: &GasParams) -> Option<RateComparison> {
    let (got, at0, waves) = match outtake {
        Some((e0, e1)) => {
            let cpl = CouplingData::new(e0, e1).ok()?;
            let s = solve_coupled_grp(&data.left, &data.right, &data.slopes_l, &data.slopes_r, &cpl, g).ok()?;
            let d = s.derivs;
            (
                [d.d_rhobar_dt, d.d_ubar_dt, d.d_pbar_dt, d.d_u_dt],
                (s.star.left_trace, s.star.right_trace),
                (s.star.left_wave, s.star.right_wave),
            )
        }
        None => {
            let s = solve_single_grp(&data.left, &data.right, &data.slopes_l, &data.slopes_r, g).ok()?;
            (
                [s.d_rho_dt, s.d_u_dt, s.d_p_dt, s.d_u_dt],
                (s.axis_state, s.axis_state),
                (s.riemann.left_wave, s.riemann.right_wave),
            )
        }
    };
    let (a1, b1) = fd_trace_rates(data, outtake, at0, FD_TAU, FD_HALF_WIDTH, FD_CELLS, g)?;
    let (a2, b2) = fd_trace_rates(data, outtake, at0, FD_TAU, FD_HALF_WIDTH, 2 * FD_CELLS, g)?;
    let coarse = [a1.rho, a1.u, a1.p, b1.u];
    let fine = [a2.rho, a2.u, a2.p, b2.u];
    let sc = rate_scales(data, g);
    Some(RateComparison {
        coupled: outtake.is_some(),
        waves,
        got,
        fd: std::array::from_fn(|i| 2.0 * fine[i] - coarse[i]),
        scale: [sc[0], sc[1], sc[2], sc[1]],
    })
}

/// Random single and coupled problems, alternating, from a fixed seed.
/// Coupled problems get an outtake in [0, 0.3) with rate in (-2, 2).
pub fn random_problems(seed: u64, count: usize) -> Vec<(LinearJump, Option<(f64, f64)>)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let data = random_jump(&mut rng);
            let outtake = (k % 2 == 1).then(|| (rng.gen_range(0.0..0.3), rng.gen_range(-2.0..2.0)));
            (data, outtake)
        })
        .collect()
}

/// Runs `compare_with_fd` over the problems on all available cores.
pub fn compare_all(problems: &[(LinearJump, Option<(f64, f64)>)], g: &GasParams) -> Vec<Option<RateComparison>> {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    let mut out = vec![None; problems.len()];
    let chunk = problems.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        for (probs, res) in problems.chunks(chunk).zip(out.chunks_mut(chunk)) {
            s.spawn(move || {
                for (p, r) in probs.iter().zip(res.iter_mut()) {
                    *r = compare_with_fd(&p.0, p.1, g);
                }
            });
        }
    });
    out
}

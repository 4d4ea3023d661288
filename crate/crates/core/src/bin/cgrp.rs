use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cgrp::config::{parse_config, SimConfig};
use cgrp::coupled_grp::solve_coupled_grp;
use cgrp::coupled_rp::{solve_coupled_rp, CouplingData};
use cgrp::driver::{run_simulation, CouplingMode};
use cgrp::grp::{solve_single_grp, SideSlopes};
use cgrp::harness::{convergence_csv, convergence_study, write_snapshots};
use cgrp::riemann::exact_rp;
use cgrp::{Error, GasParams, PrimState, Result};

#[derive(Parser)]
#[command(name = "cgrp", version, about = "Coupled GRP solver for two Euler domains joined by a gas generator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// one coupled GRP per window
    Grp,
    /// coupled Riemann problem at every common step
    Sync,
}

impl From<Mode> for CouplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Grp => CouplingMode::Grp,
            Mode::Sync => CouplingMode::SyncRp,
        }
    }
}

#[derive(clap::Args)]
struct GasArgs {
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 277.13333)]
    r_sgc: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured simulation and write snapshot CSVs
    Run {
        config: PathBuf,
        /// Override the resolution level
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, value_enum, default_value = "grp")]
        mode: Mode,
        /// Step both domains on one thread
        #[arg(long)]
        sequential: bool,
        /// Output directory (defaults to the config's path)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// L1 errors and convergence orders against a synchronized reference
    Convergence {
        config: PathBuf,
        /// Level range such as 3..6 (inclusive)
        #[arg(long, default_value = "3..6")]
        levels: String,
        #[arg(long, default_value_t = 8)]
        ref_level: u32,
        /// Write the table to this CSV file as well
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Riemann solution for two states given as rho,u,p
    Riemann {
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[command(flatten)]
        gas: GasArgs,
    },
    /// Interface traces of the coupled Riemann problem
    Couple {
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value_t = 0.0)]
        outtake: f64,
        #[command(flatten)]
        gas: GasArgs,
    },
    /// Time derivatives on the t-axis; coupled when --outtake is given
    Grp {
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        /// d rho/dx, d u/dx, d p/dx left of the jump
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
        slopes_left: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
        slopes_right: String,
        #[arg(long)]
        outtake: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        outtake_rate: f64,
        #[command(flatten)]
        gas: GasArgs,
    },
}

fn triple(s: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Validation(format!("expected three comma separated numbers, got `{s}`")))?;
    <[f64; 3]>::try_from(v).map_err(|_| Error::Validation(format!("expected three numbers, got `{s}`")))
}

fn state(s: &str) -> Result<PrimState> {
    let w = PrimState::from_array(triple(s)?);
    if !w.is_physical() {
        return Err(Error::Validation(format!("state `{s}` needs rho > 0 and p > 0")));
    }
    Ok(w)
}

fn slopes(s: &str) -> Result<SideSlopes> {
    let [a, b, c] = triple(s)?;
    Ok(SideSlopes::new(a, b, c))
}

fn load(path: &PathBuf) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| e.context(path.display().to_string()))
}

fn level_range(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Validation(format!("levels must look like 3..6, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn fmt_state(w: &PrimState) -> String {
    format!("rho = {:.10e}  u = {:.10e}  p = {:.10e}", w.rho, w.u, w.p)
}

fn execute(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Run {
            config,
            level,
            mode,
            sequential,
            out,
        } => {
            let cfg = load(&config)?;
            let level = level.unwrap_or(cfg.level);
            let mut sim = cfg.build(level, cfg.settings(mode.into(), !sequential))?;
            let res = run_simulation(&mut sim, cfg.t_end, cfg.snapshot_interval)?;
            let (nl, nr) = cfg.cells(level);
            println!("level {level}: {nl} + {nr} cells, {} windows", res.windows.len());
            let steps: (usize, usize) = res
                .windows
                .iter()
                .fold((0, 0), |a, w| (a.0 + w.steps_left, a.1 + w.steps_right));
            println!("steps: left {}, right {}", steps.0, steps.1);
            let removed = res.tally.interface_mass_removed();
            let expected = cfg.outtake.integral(0.0, cfg.t_end);
            println!("mass removed at the interface: {removed:.10e} (outtake integral {expected:.10e})");
            if let Some(dir) = out.or(cfg.output_path.clone()) {
                let files = write_snapshots(&dir, &res.snapshots, &cfg.gas)?;
                println!("wrote {} snapshots to {}", files.len(), dir.display());
            }
            Ok(())
        }
        Cmd::Convergence {
            config,
            levels,
            ref_level,
            out,
        } => {
            let cfg = load(&config)?;
            let rep = convergence_study(&cfg, &level_range(&levels)?, ref_level, CouplingMode::SyncRp)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            let csv = convergence_csv(&rep);
            print!("{csv}");
            if let Some(path) = out {
                std::fs::write(&path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Cmd::Riemann { left, right, gas } => {
            let g = GasParams::new(gas.gamma, gas.r_sgc)?;
            let (l, r) = (state(&left)?, state(&right)?);
            let sol = exact_rp(&l, &r, &g)?;
            println!("p_star = {:.10e}", sol.p_star);
            println!("u_star = {:.10e}", sol.u_star);
            println!("rho_star_left = {:.10e}", sol.rho_star_l);
            println!("rho_star_right = {:.10e}", sol.rho_star_r);
            println!("waves = {:?}, {:?}", sol.left_wave, sol.right_wave);
            Ok(())
        }
        Cmd::Couple {
            left,
            right,
            outtake,
            gas,
        } => {
            let g = GasParams::new(gas.gamma, gas.r_sgc)?;
            let st = solve_coupled_rp(&state(&left)?, &state(&right)?, &CouplingData::new(outtake, 0.0)?, &g)?;
            println!("left trace:  {}", fmt_state(&st.left_trace));
            println!("right trace: {}", fmt_state(&st.right_trace));
            println!("waves = {:?}, {:?}", st.left_wave, st.right_wave);
            println!("momentum jump = {:.10e}", st.momentum_jump());
            Ok(())
        }
        Cmd::Grp {
            left,
            right,
            slopes_left,
            slopes_right,
            outtake,
            outtake_rate,
            gas,
        } => {
            let g = GasParams::new(gas.gamma, gas.r_sgc)?;
            let (l, r) = (state(&left)?, state(&right)?);
            let (sl, sr) = (slopes(&slopes_left)?, slopes(&slopes_right)?);
            match outtake {
                None => {
                    let s = solve_single_grp(&l, &r, &sl, &sr, &g)?;
                    println!("axis state: {}", fmt_state(&s.axis_state));
                    println!("d/dt: rho = {:.10e}  u = {:.10e}  p = {:.10e}", s.d_rho_dt, s.d_u_dt, s.d_p_dt);
                }
                Some(e) => {
                    let s = solve_coupled_grp(&l, &r, &sl, &sr, &CouplingData::new(e, outtake_rate)?, &g)?;
                    let d = s.derivs;
                    println!("left trace:  {}", fmt_state(&s.star.left_trace));
                    println!("right trace: {}", fmt_state(&s.star.right_trace));
                    println!(
                        "left d/dt:  rho = {:.10e}  u = {:.10e}  p = {:.10e}",
                        d.d_rhobar_dt, d.d_ubar_dt, d.d_pbar_dt
                    );
                    println!("right d/dt: rho = {:.10e}  u = {:.10e}  p = {:.10e}", d.d_rho_dt, d.d_u_dt, d.d_p_dt);
                    println!("det = {:.10e}", s.det);
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

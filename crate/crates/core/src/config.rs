//! Simulation configuration in a sectioned `key = value` format.
//!
//! ```text
//! [gas]        gamma, r_sgc
//! [left]       x_min, x_max, base_cells, rho, u, p, [bump_x, bump_values]
//! [right]      same keys as [left]
//! [interface]  outtake = trapezoid (rate, plateau, t_down)
//!                      | spline (times, values) | constant (value)
//! [time]       t_end, c_cfl, [p_order = 1], [level = 0], [limiter_tvb = 0]
//! [output]     [snapshot_interval], [path]
//! ```
//!
//! Lines starting with `#` are comments. Lists are comma separated.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::driver::{CouplingMode, DriverSettings, Simulation};
use crate::error::{Error, Result};
use crate::euler::{ConsState, GasParams, PrimState};
use crate::fv::{DomainGrid, DomainSide, DomainState, FarFieldSpec, SlopeLimiter};
use crate::outtake::OuttakeProfile;
use crate::spline::PeriodicSpline;

/// One side of the interface: geometry and initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub base_cells: usize,
    pub base: PrimState,
    /// Density perturbation added to the base state.
    pub bump: Option<PeriodicSpline>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub gas: GasParams,
    pub left: DomainSpec,
    pub right: DomainSpec,
    pub outtake: OuttakeProfile,
    pub t_end: f64,
    pub c_cfl: f64,
    pub p_order: u32,
    pub level: u32,
    /// TVB constant of the slope limiter, relative to each domain's base state.
    pub limiter_tvb: f64,
    pub snapshot_interval: Option<f64>,
    pub output_path: Option<PathBuf>,
}

const SECTIONS: [&str; 6] = ["gas", "left", "right", "interface", "time", "output"];
const DOMAIN_KEYS: [&str; 8] = ["x_min", "x_max", "base_cells", "rho", "u", "p", "bump_x", "bump_values"];

fn allowed(section: &str) -> &'static [&'static str] {
    match section {
        "gas" => &["gamma", "r_sgc"],
        "left" | "right" => &DOMAIN_KEYS,
        "interface" => &["outtake", "rate", "plateau", "t_down", "times", "values", "value"],
        "time" => &["t_end", "c_cfl", "p_order", "level", "limiter_tvb"],
        "output" => &["snapshot_interval", "path"],
        _ => &[],
    }
}

/// Key/value pairs of one section with the line of each entry.
struct Section {
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn num(&self, name: &str, key: &str) -> Result<f64> {
        self.opt_num(key)?.ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("[{name}] is missing `{key}`"),
        })
    }

    fn opt_num(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|(line, v)| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{key}` expects a number, got `{v}`"),
                })
            })
            .transpose()
    }

    fn opt_int(&self, key: &str) -> Result<Option<u64>> {
        self.raw(key)
            .map(|(line, v)| {
                v.parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{key}` expects a non-negative integer, got `{v}`"),
                })
            })
            .transpose()
    }

    fn list(&self, name: &str, key: &str) -> Result<Vec<f64>> {
        let (line, v) = self.raw(key).ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("[{name}] is missing `{key}`"),
        })?;
        v.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{key}` expects a comma separated list of numbers, got `{v}`"),
                })
            })
            .collect()
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                msg: format!("malformed section header `{l}`"),
            })?;
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown section [{name}]"),
                });
            }
            if out.contains_key(&name) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate section [{name}]"),
                });
            }
            out.insert(
                name.clone(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let Some(sec) = current.as_ref() else {
            return Err(Error::Parse {
                line,
                msg: "entry outside of any section".into(),
            });
        };
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, got `{l}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !allowed(sec).contains(&k) {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key `{k}` in [{sec}]"),
            });
        }
        let entries = &mut out.get_mut(sec).expect("section was inserted").entries;
        if entries.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{k}` in [{sec}]"),
            });
        }
    }
    Ok(out)
}

fn domain(name: &str, s: &Section) -> Result<DomainSpec> {
    let bump = match (s.raw("bump_x"), s.raw("bump_values")) {
        (None, None) => None,
        (Some(_), Some(_)) => Some(PeriodicSpline::new(s.list(name, "bump_x")?, s.list(name, "bump_values")?)?),
        _ => {
            return Err(Error::Parse {
                line: s.line,
                msg: format!("[{name}] needs both `bump_x` and `bump_values`"),
            })
        }
    };
    let base_cells = s.opt_int("base_cells")?.ok_or_else(|| Error::Parse {
        line: s.line,
        msg: format!("[{name}] is missing `base_cells`"),
    })? as usize;
    Ok(DomainSpec {
        x_min: s.num(name, "x_min")?,
        x_max: s.num(name, "x_max")?,
        base_cells,
        base: PrimState::new(s.num(name, "rho")?, s.num(name, "u")?, s.num(name, "p")?),
        bump,
    })
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    let secs = split_sections(text)?;
    let eof = text.lines().count().max(1);
    let get = |name: &str| {
        secs.get(name).ok_or_else(|| Error::Parse {
            line: eof,
            msg: format!("missing section [{name}]"),
        })
    };
    let gas_s = get("gas")?;
    let gas = GasParams::new(gas_s.num("gas", "gamma")?, gas_s.num("gas", "r_sgc")?)?;
    let left = domain("left", get("left")?)?;
    let right = domain("right", get("right")?)?;

    let itf = get("interface")?;
    let (kind_line, kind) = itf.raw("outtake").ok_or_else(|| Error::Parse {
        line: itf.line,
        msg: "[interface] is missing `outtake`".into(),
    })?;
    let outtake = match kind {
        "trapezoid" => OuttakeProfile::trapezoid(
            itf.num("interface", "rate")?,
            itf.num("interface", "plateau")?,
            itf.num("interface", "t_down")?,
        )?,
        "spline" => OuttakeProfile::spline(itf.list("interface", "times")?, itf.list("interface", "values")?)?,
        "constant" => OuttakeProfile::constant(itf.num("interface", "value")?)?,
        other => {
            return Err(Error::Parse {
                line: kind_line,
                msg: format!("unknown outtake kind `{other}` (trapezoid, spline or constant)"),
            })
        }
    };

    let time = get("time")?;
    let out = get("output")?;
    let cfg = SimConfig {
        gas,
        left,
        right,
        outtake,
        t_end: time.num("time", "t_end")?,
        c_cfl: time.num("time", "c_cfl")?,
        p_order: time.opt_int("p_order")?.unwrap_or(1) as u32,
        level: time.opt_int("level")?.unwrap_or(0) as u32,
        limiter_tvb: time.opt_num("limiter_tvb")?.unwrap_or(0.0),
        snapshot_interval: out.opt_num("snapshot_interval")?,
        output_path: out.raw("path").map(|(_, v)| PathBuf::from(v)),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        for (name, d) in [("left", &self.left), ("right", &self.right)] {
            if !(d.x_max > d.x_min) {
                return bad(format!("[{name}] needs x_max > x_min"));
            }
            if d.base_cells < 1 {
                return bad(format!("[{name}] needs base_cells >= 1"));
            }
            if !d.base.is_physical() {
                return bad(format!("[{name}] initial state must have rho > 0 and p > 0"));
            }
            let c = d.base.sound_speed(&self.gas);
            if !(d.base.u >= 0.0 && d.base.u < c) {
                return bad(format!("[{name}] initial velocity must satisfy 0 <= u < c = {c}"));
            }
            if let Some(b) = &d.bump {
                let n = b.nodes();
                if n[0] < d.x_min || n[n.len() - 1] > d.x_max {
                    return bad(format!("[{name}] density bump must lie inside the domain"));
                }
            }
        }
        if self.left.x_max != self.right.x_min {
            return bad(format!(
                "the interface must be shared: left x_max = {} but right x_min = {}",
                self.left.x_max, self.right.x_min
            ));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be >= 0, got {}", self.t_end));
        }
        if !(self.c_cfl > 0.0 && self.c_cfl <= 1.0) {
            return bad(format!("c_cfl must lie in (0, 1], got {}", self.c_cfl));
        }
        if let Some(dt) = self.snapshot_interval {
            if !(dt > 0.0) {
                return bad(format!("snapshot_interval must be > 0, got {dt}"));
            }
        }
        if !(self.limiter_tvb >= 0.0 && self.limiter_tvb.is_finite()) {
            return bad(format!("limiter_tvb must be a finite number >= 0, got {}", self.limiter_tvb));
        }
        if self.level > 20 {
            return bad(format!("level {} is unreasonably fine", self.level));
        }
        Ok(())
    }

    pub fn settings(&self, mode: CouplingMode, concurrent: bool) -> DriverSettings {
        DriverSettings {
            c_cfl: self.c_cfl,
            p_order: self.p_order,
            mode,
            concurrent,
        }
    }

    pub fn cells(&self, level: u32) -> (usize, usize) {
        (self.left.base_cells << level, self.right.base_cells << level)
    }

    /// Initial domain state with exact cell averages of the density bump.
    fn initial_state(&self, d: &DomainSpec, n: usize, side: DomainSide) -> Result<DomainState> {
        let grid = DomainGrid::new(d.x_min, d.x_max, n, side)?;
        let dx = grid.dx();
        let g = &self.gas;
        let cells = (0..n)
            .map(|i| {
                let lo = grid.center(i) - 0.5 * dx;
                let extra = d.bump.as_ref().map_or(0.0, |b| b.integral(lo, lo + dx) / dx);
                let rho = d.base.rho + extra;
                let u = d.base.u;
                ConsState {
                    rho,
                    mom: rho * u,
                    en: d.base.p / (g.gamma - 1.0) + 0.5 * rho * u * u,
                }
            })
            .collect();
        DomainState::new(grid, 0.0, cells, g)?.with_limiter(SlopeLimiter::relative_to(self.limiter_tvb, &d.base, g), g)
    }

    pub fn build(&self, level: u32, settings: DriverSettings) -> Result<Simulation> {
        let (nl, nr) = self.cells(level);
        Simulation::new(
            self.initial_state(&self.left, nl, DomainSide::Left)?,
            self.initial_state(&self.right, nr, DomainSide::Right)?,
            FarFieldSpec { state: self.left.base },
            FarFieldSpec { state: self.right.base },
            self.outtake.clone(),
            settings,
            self.gas,
        )
    }
}

pub const CASE1: &str = include_str!("../cases/case1.cfg");
pub const CASE2: &str = include_str!("../cases/case2.cfg");
pub const CASE3: &str = include_str!("../cases/case3.cfg");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_case1() {
        let c = parse_config(CASE1).unwrap();
        assert_eq!(c.t_end, 0.7);
        assert_eq!(c.c_cfl, 0.2);
        assert_eq!((c.left.x_min, c.left.x_max, c.right.x_min, c.right.x_max), (-400.0, 0.0, 0.0, 400.0));
        assert_eq!((c.left.base_cells, c.right.base_cells), (2, 2));
        assert_eq!(c.left.base, PrimState::new(1.0, 1.0, 146820.4));
        assert_eq!(c.outtake, OuttakeProfile::trapezoid(3.0, 0.6, 0.3).unwrap());
        assert_eq!(c.gas, GasParams::air());
    }

    #[test]
    fn shipped_case2_and_case3() {
        let c = parse_config(CASE2).unwrap();
        assert_eq!((c.t_end, c.c_cfl), (0.06, 0.2));
        assert_eq!((c.left.x_min, c.right.x_max), (-20.0, 70.0));
        assert_eq!((c.left.base_cells, c.right.base_cells), (2, 7));
        assert!((c.outtake.eval(0.03).0 - 50.0).abs() < 1e-12);
        let c = parse_config(CASE3).unwrap();
        assert_eq!((c.t_end, c.c_cfl), (0.6, 0.9));
        assert_eq!((c.left.x_min, c.right.x_max), (-20.0, 20.0));
        assert_eq!(c.outtake, OuttakeProfile::constant(3.0).unwrap());
        assert!((c.left.bump.as_ref().unwrap().eval(-10.0).0 - 0.2).abs() < 1e-12);
        assert!(c.right.bump.is_none());
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(parse_config(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn bad_gamma_is_a_validation_error() {
        let text = CASE1.replace("gamma = 1.4", "gamma = 0.9");
        assert!(matches!(parse_config(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = CASE1.replace("r_sgc", "r_gas");
        let line = CASE1.lines().position(|l| l.contains("r_sgc")).unwrap() + 1;
        match parse_config(&text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line),
            other => panic!("{other:?}"),
        }
        let text = CASE1.replace("c_cfl = 0.2", "c_cfl = fast");
        assert!(matches!(parse_config(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn interface_must_be_shared() {
        let text = CASE1.replace("x_min = 0", "x_min = 1");
        assert!(matches!(parse_config(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn bump_cell_averages_are_exact() {
        let c = parse_config(CASE3).unwrap();
        let sim = c.build(2, c.settings(CouplingMode::Grp, false)).unwrap();
        let m = sim.left.totals().rho;
        assert!((m - 21.0).abs() < 1e-12, "{m}");
    }
}

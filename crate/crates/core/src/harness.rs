//! Error measurement, convergence studies and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::SimConfig;
use crate::driver::{run_simulation, CouplingMode, Snapshot};
use crate::error::{Error, Result};
use crate::euler::{cons_to_prim, ConsState, GasParams};
use crate::fv::DomainState;

/// Cell averages of `fine` over blocks matching the cells of `coarse`.
fn restrict(fine: &DomainState, coarse: &DomainState) -> Result<Vec<ConsState>> {
    let (gf, gc) = (&fine.grid, &coarse.grid);
    if gf.x_min != gc.x_min || gf.x_max != gc.x_max || gf.side != gc.side {
        return Err(Error::MismatchedDomains(format!(
            "[{}, {}] vs [{}, {}]",
            gc.x_min, gc.x_max, gf.x_min, gf.x_max
        )));
    }
    if gf.n_cells < gc.n_cells || gf.n_cells % gc.n_cells != 0 {
        return Err(Error::MismatchedDomains(format!(
            "{} reference cells do not refine {} cells",
            gf.n_cells, gc.n_cells
        )));
    }
    let r = gf.n_cells / gc.n_cells;
    Ok(fine
        .cells
        .chunks(r)
        .map(|b| {
            let s = b.iter().fold([0.0; 3], |a, c| [a[0] + c.rho, a[1] + c.mom, a[2] + c.en]);
            ConsState::from_array(s.map(|v| v / r as f64))
        })
        .collect())
}

fn domain_l1(run: &DomainState, reference: &DomainState) -> Result<[f64; 3]> {
    let fine = restrict(reference, run)?;
    let dx = run.grid.dx();
    let mut e = [0.0; 3];
    for (a, b) in run.cells.iter().zip(&fine) {
        let (a, b) = (a.as_array(), b.as_array());
        for k in 0..3 {
            e[k] += (a[k] - b[k]).abs() * dx;
        }
    }
    Ok(e)
}

/// Maximum over the conserved components of the summed L1 errors of both
/// domains, against block averages of the reference.
pub fn l1_error(run: &Snapshot, reference: &Snapshot) -> Result<f64> {
    if (run.t - reference.t).abs() > 1e-9 * run.t.abs().max(1.0) {
        return Err(Error::MismatchedDomains(format!(
            "snapshot times differ: {} vs {}",
            run.t, reference.t
        )));
    }
    let l = domain_l1(&run.left, &reference.left)?;
    let r = domain_l1(&run.right, &reference.right)?;
    Ok((0..3).map(|k| l[k] + r[k]).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub err: f64,
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub warnings: Vec<String>,
}

impl ConvergenceReport {
    /// Fills in `log2(err_prev / err)` for consecutive rows.
    pub fn from_errors(levels_errs: &[(u32, f64)]) -> Self {
        let rows = levels_errs
            .iter()
            .enumerate()
            .map(|(i, &(level, err))| ConvergenceRow {
                level,
                err,
                eoc: (i > 0).then(|| eoc(levels_errs[i - 1].1, err)),
            })
            .collect();
        Self {
            rows,
            warnings: Vec::new(),
        }
    }

    pub fn eocs(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.eoc).collect()
    }
}

pub fn eoc(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).log2()
}

/// Runs the reference at `ref_level` in `ref_mode` and every level in
/// coupled-GRP mode, reporting errors at the final time.
pub fn convergence_study(
    cfg: &SimConfig,
    levels: &[u32],
    ref_level: u32,
    ref_mode: CouplingMode,
) -> Result<ConvergenceReport> {
    let mut warnings = Vec::new();
    if let Some(&max) = levels.iter().max() {
        if ref_level < max {
            return Err(Error::Validation(format!(
                "reference level {ref_level} is coarser than level {max}"
            )));
        }
        if ref_level == max {
            warnings.push(format!(
                "reference level {ref_level} equals the finest level; its error is zero by construction"
            ));
        }
    }
    let mut reference = cfg.build(ref_level, cfg.settings(ref_mode, true))?;
    let reference = run_simulation(&mut reference, cfg.t_end, None)
        .map_err(|e| e.context(format!("reference run at level {ref_level}")))?;
    let mut errs = Vec::new();
    for &level in levels {
        let mut sim = cfg.build(level, cfg.settings(CouplingMode::Grp, true))?;
        let out = run_simulation(&mut sim, cfg.t_end, None).map_err(|e| e.context(format!("level {level}")))?;
        errs.push((level, l1_error(out.last(), reference.last())?));
    }
    let mut rep = ConvergenceReport::from_errors(&errs);
    rep.warnings = warnings;
    Ok(rep)
}

pub fn convergence_csv(rep: &ConvergenceReport) -> String {
    let mut s = String::from("level,err,eoc\n");
    for r in &rep.rows {
        let eoc = r.eoc.map(|v| format!("{v:.4}")).unwrap_or_default();
        let _ = writeln!(s, "{},{:.6e},{}", r.level, r.err, eoc);
    }
    s
}

/// Snapshot rows `t,domain,x_center,rho,u,p,mom,energy`.
pub fn snapshot_csv(snap: &Snapshot, g: &GasParams) -> Result<String> {
    let mut s = String::from("t,domain,x_center,rho,u,p,mom,energy\n");
    for (tag, dom) in [("L", &snap.left), ("R", &snap.right)] {
        for (i, c) in dom.cells.iter().enumerate() {
            let w = cons_to_prim(c, g)?;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                snap.t,
                tag,
                dom.grid.center(i),
                w.rho,
                w.u,
                w.p,
                c.mom,
                c.en
            );
        }
    }
    Ok(s)
}

/// Writes one CSV per snapshot and an `index.csv` listing them.
pub fn write_snapshots(dir: &Path, snaps: &[Snapshot], g: &GasParams) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut index = String::from("index,t,file\n");
    let mut files = Vec::new();
    for (k, snap) in snaps.iter().enumerate() {
        let name = format!("snapshot_{k:04}.csv");
        fs::write(dir.join(&name), snapshot_csv(snap, g)?)?;
        let _ = writeln!(index, "{k},{},{name}", snap.t);
        files.push(dir.join(name));
    }
    fs::write(dir.join("index.csv"), index)?;
    Ok(files)
}

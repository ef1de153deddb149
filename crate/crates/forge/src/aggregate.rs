//! `report`: merge run reports into a residual matrix and plot data.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use soliton_core::soliton::model;
use soliton_core::IdentityReport;

use crate::spec::RunReport;
use crate::suites::case_name;
use crate::ForgeError;

/// case -> identity -> largest residual over all inputs
pub type Matrix = BTreeMap<String, BTreeMap<String, f64>>;

pub const PLOT_POINTS: usize = 256;
pub const PLOT_HEADER: [&str; 4] = ["r", "R", "rR", "V"];
const PLOT_RMIN: f64 = 0.1;

pub fn read_report(path: &Path) -> Result<RunReport, ForgeError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ForgeError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ForgeError::Usage(format!("{}: not a run report: {e}", path.display())))
}

pub fn merge(reports: &[RunReport]) -> Matrix {
    let mut m = Matrix::new();
    for r in reports.iter().flat_map(|rr| &rr.reports) {
        let slot = m
            .entry(r.case.clone())
            .or_default()
            .entry(r.identity.clone())
            .or_insert(0.0);
        *slot = IdentityReport::max_of([*slot, r.max_abs_residual]);
    }
    m
}

/// Rows `(r, R, r R, V(r))` on a log grid of a profile-backed run, rebuilt
/// from the spec echo. `None` for closed-form models.
pub fn plot_rows(report: &RunReport) -> Result<Option<(String, Vec<[f64; 4]>)>, ForgeError> {
    let spec = &report.spec;
    let s = model(&spec.model, &spec.resolved_params())
        .map_err(|e| ForgeError::Failure(format!("cannot rebuild `{}`: {e}", spec.model)))?;
    let Some(prof) = s.profile.clone() else {
        return Ok(None);
    };
    let (lo, hi) = (PLOT_RMIN.max(prof.rmin()).ln(), prof.rmax().ln());
    let mut rows = Vec::with_capacity(PLOT_POINTS);
    for i in 0..PLOT_POINTS {
        let r = (lo + (hi - lo) * i as f64 / (PLOT_POINTS - 1) as f64)
            .exp()
            .clamp(prof.rmin(), prof.rmax());
        let fail = |e: soliton_core::Error| ForgeError::Failure(e.to_string());
        let scalar = prof.scalar(r).map_err(fail)?;
        rows.push([r, scalar, r * scalar, prof.volume(r).map_err(fail)?]);
    }
    Ok(Some((case_name(&s), rows)))
}

/// Reads the inputs and writes `matrix.json` plus one plot CSV per
/// profile-backed case (`bryant(3)` goes to `plot_bryant-3.csv`) into `out`. Returns the written paths.
pub fn cmd_report(inputs: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>, ForgeError> {
    if inputs.is_empty() {
        return Err(ForgeError::Usage("report needs at least one input".into()));
    }
    let reports = inputs.iter().map(|p| read_report(p)).collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(out)?;
    let mut written = Vec::new();

    let matrix = merge(&reports);
    let mut text = serde_json::to_string_pretty(&matrix).expect("matrix serializes");
    text.push('\n');
    let path = out.join("matrix.json");
    fs::write(&path, text)?;
    written.push(path);

    let mut plots = BTreeMap::new();
    for r in &reports {
        if let Some((case, rows)) = plot_rows(r)? {
            plots.entry(case).or_insert(rows);
        }
    }
    for (case, rows) in plots {
        let stem: String = case.chars().filter(|c| *c != ')').map(|c| if c == '(' { '-' } else { c }).collect();
        let path = out.join(format!("plot_{stem}.csv"));
        let csv_err = |e: csv::Error| ForgeError::Failure(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(PLOT_HEADER).map_err(csv_err)?;
        for row in rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(csv_err)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

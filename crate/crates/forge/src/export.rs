//! `bryant`: integrate a profile, write its CSV and a summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use soliton_core::curvature::Depth;
use soliton_core::error::Error;
use soliton_core::profile::{self, asymptotics, Asymptotics, ProfileParams, SolitonProfile};
use soliton_core::soliton::{d_tensor_at, profile_chart, PointData, SolitonStructure};
use soliton_core::tensor::contract_full;

use crate::{pool, ForgeError};

pub const CSV_HEADER: [&str; 10] = ["r", "w", "dw", "f", "df", "R", "Ric_rr", "Ric_sph", "D_norm", "B_norm"];
pub const STEADY_RMAX: f64 = 1000.0;
pub const EXPANDING_RMAX: f64 = 200.0;

#[derive(Clone, Debug)]
pub struct BryantArgs {
    pub dim: usize,
    pub a: Option<f64>,
    pub rho: f64,
    pub rmax: Option<f64>,
    pub tol: f64,
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub tool_version: &'static str,
    pub params: ProfileParams,
    pub nodes: usize,
    pub c0: f64,
    pub asymptotics: Option<Asymptotics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl BryantArgs {
    pub fn profile_params(&self) -> Result<ProfileParams, ForgeError> {
        let steady = self.rho == profile::STEADY;
        if !steady && self.rho != profile::EXPANDING {
            return Err(ForgeError::Usage(format!("--rho must be 0 or -0.5, got {}", self.rho)));
        }
        if self.dim < 3 {
            return Err(ForgeError::Usage(format!("--dim must be at least 3, got {}", self.dim)));
        }
        let a = self.a.unwrap_or(if steady { -1.0 / self.dim as f64 } else { -1.0 });
        if !(a <= 0.0) {
            return Err(ForgeError::Usage(format!("--a must be <= 0, got {a}")));
        }
        let rmax = self.rmax.unwrap_or(if steady { STEADY_RMAX } else { EXPANDING_RMAX });
        if !(rmax > 1.0) {
            return Err(ForgeError::Usage(format!("--rmax must exceed 1, got {rmax}")));
        }
        if !(1e-12..=1e-6).contains(&self.tol) {
            return Err(ForgeError::Usage(format!("--tol must lie in [1e-12, 1e-6], got {}", self.tol)));
        }
        let base = if steady {
            ProfileParams::steady(self.dim, a)
        } else {
            ProfileParams::expanding(self.dim, a)
        };
        Ok(base.rmax(rmax).tol(self.tol))
    }
}

fn norm(t: &soliton_core::Tensor, ginv: &soliton_core::Tensor) -> f64 {
    contract_full(t, t, ginv).max(0.0).sqrt()
}

/// `|D|` and `|B|` from the generic engine at an equator point of radius `r`.
fn conformal_norms(s: &SolitonStructure, r: f64) -> (f64, f64) {
    let p = s.radial_point(r);
    let d = match PointData::new(s, &p, Depth::Bach) {
        Ok(d) => d,
        Err(_) => return (f64::NAN, f64::NAN),
    };
    let b = d.pack.bach.as_ref().map_or(f64::NAN, |b| norm(b, &d.pack.ginv));
    (norm(&d_tensor_at(&d), &d.pack.ginv), b)
}

fn row(prof: &SolitonProfile, s: &SolitonStructure, k: usize) -> [f64; 10] {
    let r = prof.nodes()[k];
    let y = prof.node_states()[k];
    let (ric_rr, ric_sph, scalar) = match (prof.warped_curvature(r), prof.scalar(r)) {
        (Ok(c), Ok(sc)) => (c.ric_rr, c.ric_sph, sc),
        _ => (f64::NAN, f64::NAN, f64::NAN),
    };
    let (dn, bn) = conformal_norms(s, r);
    [r, y[0], y[1], y[2], y[3], scalar, ric_rr, ric_sph, dn, bn]
}

/// Writes the profile CSV (17 significant digits).
pub fn write_profile_csv(prof: &Arc<SolitonProfile>, path: &Path) -> Result<(), ForgeError> {
    let s = profile_chart(prof.clone());
    let rows: Vec<[f64; 10]> =
        pool::build().install(|| (0..prof.nodes().len()).into_par_iter().map(|k| row(prof, &s, k)).collect());
    let mut w = csv::Writer::from_path(path).map_err(|e| ForgeError::Failure(format!("{}: {e}", path.display())))?;
    let csv_err = |e: csv::Error| ForgeError::Failure(format!("{}: {e}", path.display()));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:.16e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Integrates the profile, writes `profile.csv` and `summary.json` into
/// `args.out`, and returns the summary.
pub fn cmd_bryant(args: &BryantArgs) -> Result<Summary, ForgeError> {
    let params = args.profile_params()?;
    let prof = profile::integrate(params).map_err(|e| match e {
        Error::InvalidParams(m) => ForgeError::Usage(m),
        e => ForgeError::Failure(e.to_string()),
    })?;
    let prof = Arc::new(prof);
    fs::create_dir_all(&args.out)?;
    write_profile_csv(&prof, &args.out.join("profile.csv"))?;
    let (asym, message) = match asymptotics(&prof) {
        Ok(a) => (Some(a), None),
        Err(e @ Error::RmaxTooSmall { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(ForgeError::Failure(e.to_string())),
    };
    let summary = Summary {
        tool_version: crate::TOOL_VERSION,
        params,
        nodes: prof.nodes().len(),
        c0: prof.c0(),
        asymptotics: asym,
        message,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(args.out.join("summary.json"), text)?;
    Ok(summary)
}

//! Verification suites over the model registry.
//!
//! Every identity becomes one [`IdentityReport`] holding the largest residual
//! over its evaluation points. Errors at a point (outside the domain, step
//! underflow, ..) turn the residual into NaN, stored as a failing report.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;
use soliton_core::curvature::{self, curvature_pack, Depth};
use soliton_core::error::Error;
use soliton_core::level::{
    check_d2, einstein_fiber_check, level_data, majorant_scan, prop32_battery, weighted_flux, BATTERY_TOL,
};
use soliton_core::profile::{asymptotics, brendle_tables, flux_scan, Brendle};
use soliton_core::soliton::{
    bach_flux_identity, check_bd, d_tensor_at, dcw_defect, hamilton_identities_at, model, normalize_steady,
    sample_points, soliton_residual_at, DTensor, PointData, SolitonStructure,
};
use soliton_core::tensor::contract_full;
use soliton_core::{ChartPoint, IdentityReport};

use crate::spec::{RunReport, VerifySpec, SUITES};
use crate::{pool, ForgeError};

/// Points used by identities that difference the order-4 pipeline.
pub const DIFFERENCED_POINTS: usize = 8;
/// Level-set sample count for the level batteries.
pub const LEVEL_SAMPLES: usize = 8;
/// Radius whose level set the batteries use.
pub const LEVEL_RADIUS: f64 = 1.0;
/// Radii of the boundary flux scans.
pub const FLUX_RADII: [f64; 3] = [10.0, 20.0, 40.0];
/// Radii of the majorant scan.
pub const MAJORANT_RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

const ALGEBRAIC_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-8;
const PROFILE_TOL: f64 = 1e-6;
const VANISHING_TOL: f64 = 1e-6;
const DIVERGENCE_TOL: f64 = 1e-7;
const FLUX_TOL: f64 = 1e-10;

/// Models whose metric is locally conformally flat.
fn conformally_flat(name: &str) -> bool {
    matches!(name, "flat" | "gaussian-expander" | "bryant" | "expander")
}

/// Models with `D = 0` and a nonconstant potential, where the level
/// batteries apply.
fn d_vanishes(name: &str) -> bool {
    matches!(name, "gaussian-expander" | "bryant" | "expander")
}

/// Suites that make sense for a structure, or why not.
pub fn applicable(suite: &str, s: &SolitonStructure) -> Result<(), String> {
    let n = s.dim();
    let why = match suite {
        "steady-identities" | "conformal-tensors" => None,
        "bach-divergence" if n < 3 => Some("needs dimension >= 3"),
        "level-geometry" if n < 3 => Some("needs dimension >= 3"),
        "level-geometry" if s.name == "flat" => Some("needs a nonconstant potential"),
        "asymptotics" if s.profile.is_none() => Some("needs a profile-backed model"),
        "brendle" if s.profile.is_none() || !s.is_steady() => Some("needs a steady profile-backed model"),
        _ => None,
    };
    match why {
        Some(w) => Err(format!("suite `{suite}` {w}; model `{}` does not qualify", s.name)),
        None => Ok(()),
    }
}

/// Report label of a structure.
pub fn case_name(s: &SolitonStructure) -> String {
    match s.name.as_str() {
        "cigar" | "line-cigar" => s.name.clone(),
        _ => format!("{}({})", s.name, s.dim()),
    }
}

struct Runner<'a> {
    spec: &'a VerifySpec,
    s: SolitonStructure,
    case: String,
    points: Vec<ChartPoint>,
    pool: ThreadPool,
    out: Vec<IdentityReport>,
}

impl Runner<'_> {
    fn tol_default(&self) -> f64 {
        if self.s.profile.is_some() {
            PROFILE_TOL
        } else {
            CLOSED_FORM_TOL
        }
    }

    fn push(&mut self, identity: &str, points: usize, residual: f64, default_tol: f64) {
        let tol = self.spec.tolerance(identity, default_tol);
        self.out
            .push(IdentityReport::new(self.case.clone(), identity, self.s.dim(), points, residual, tol));
    }

    /// Column maxima of per-point residual vectors; `None` rows are skipped
    /// (not applicable at that point) and errors poison every column.
    fn scan<F>(&self, pts: &[ChartPoint], k: usize, f: F) -> (Vec<f64>, usize)
    where
        F: Fn(&ChartPoint) -> Result<Option<Vec<f64>>, Error> + Sync,
    {
        let rows: Vec<Result<Option<Vec<f64>>, Error>> = self.pool.install(|| pts.par_iter().map(&f).collect());
        let mut cols = vec![0.0f64; k];
        let mut used = 0;
        for row in rows {
            match row {
                Ok(Some(v)) => {
                    used += 1;
                    for (c, x) in cols.iter_mut().zip(v) {
                        *c = IdentityReport::max_of([*c, x]);
                    }
                }
                Ok(None) => {}
                Err(_) => {
                    used += 1;
                    cols.iter_mut().for_each(|c| *c = f64::NAN);
                }
            }
        }
        (cols, used)
    }

    fn steady_identities(&mut self) {
        let n = self.s.dim();
        let s = &self.s.clone();
        let hamilton = s.rho <= 0.0;
        let (cols, used) = self.scan(&self.points, 5, |p| {
            let d = PointData::new(s, p, Depth::Cotton)?;
            let (gr, cons) = if hamilton {
                let h = hamilton_identities_at(s, &d)?;
                (h.grad_r, h.conservation)
            } else {
                (0.0, 0.0)
            };
            let dsym = if n >= 3 {
                let t = d_tensor_at(&d);
                DTensor { n, values: t.data }.symmetry_residual(&d.pack.ginv)
            } else {
                0.0
            };
            Ok(Some(vec![soliton_residual_at(&d, s.rho), gr, cons, (-d.pack.scalar).max(0.0), dsym]))
        });
        let tol = self.tol_default();
        self.push("soliton_residual", used, cols[0], tol);
        if hamilton {
            self.push("hamilton_grad_r", used, cols[1], tol);
            self.push("hamilton_conservation", used, cols[2], tol);
        }
        self.push("scalar_nonneg", used, cols[3], ALGEBRAIC_TOL);
        if n >= 3 {
            self.push("d_symmetry", used, cols[4], 1e-11);
        }
    }

    fn conformal_tensors(&mut self) {
        let n = self.s.dim();
        let s = &self.s.clone();
        let lcf = conformally_flat(&s.name) && n >= 3;
        let depth = if lcf { Depth::Bach } else if n >= 3 { Depth::Cotton } else { Depth::Riemann };
        let (cols, used) = self.scan(&self.points, 12, |p| {
            let d = PointData::new(s, p, depth)?;
            let pack = &d.pack;
            let mut v = vec![
                pack.riemann_symmetry_residual(),
                pack.ricci_asymmetry(),
                pack.weyl_trace_residual(),
                pack.weyl_decomposition_residual(),
            ];
            if n >= 3 {
                v.push(pack.cotton_symmetry_residual().unwrap_or(f64::NAN));
                v.push(pack.cotton_forms_residual().unwrap_or(f64::NAN));
                v.push(if n >= 4 { curvature::weyl_divergence_residual(pack) } else { 0.0 });
                v.push(dcw_defect(&d).max_abs());
                if lcf {
                    let norm = |t: &soliton_core::Tensor| contract_full(t, t, &pack.ginv).max(0.0).sqrt();
                    let b = pack.bach.as_ref().map(norm).unwrap_or(f64::NAN);
                    v.extend([norm(&pack.weyl), norm(pack.cotton()), b, norm(&d_tensor_at(&d))]);
                }
            }
            Ok(Some(v))
        });
        self.push("riemann_symmetries", used, cols[0], ALGEBRAIC_TOL);
        self.push("ricci_symmetry", used, cols[1], ALGEBRAIC_TOL);
        self.push("weyl_traces", used, cols[2], ALGEBRAIC_TOL);
        self.push("weyl_decomposition", used, cols[3], ALGEBRAIC_TOL);
        if n < 3 {
            return;
        }
        self.push("cotton_symmetries", used, cols[4], ALGEBRAIC_TOL);
        self.push("cotton_forms", used, cols[5], ALGEBRAIC_TOL);
        if n >= 4 {
            self.push("cotton_weyl_divergence", used, cols[6], ALGEBRAIC_TOL);
        }
        self.push("dcw", used, cols[7], VANISHING_TOL);
        if lcf {
            if n >= 4 {
                self.push("weyl_norm", used, cols[8], VANISHING_TOL);
            }
            self.push("cotton_norm", used, cols[9], VANISHING_TOL);
            self.push("bach_norm", used, cols[10], VANISHING_TOL);
            self.push("d_norm", used, cols[11], VANISHING_TOL);
        }
        let pts: Vec<ChartPoint> = self.points.iter().take(DIFFERENCED_POINTS).cloned().collect();
        let (cols, used) = self.scan(&pts, 1, |p| Ok(Some(vec![check_bd(s, p)?.residual])));
        self.push("bd", used, cols[0], VANISHING_TOL);
    }

    fn bach_divergence(&mut self) {
        let n = self.s.dim();
        let s = &self.s.clone();
        let pts: Vec<ChartPoint> = self.points.iter().take(DIFFERENCED_POINTS).cloned().collect();
        let (cols, used) = self.scan(&pts, 2, |p| {
            let div = curvature::bach_divergence_check(s.chart.as_ref(), p)?;
            let flux = if n == 3 { bach_flux_identity(s, p)?.residual } else { 0.0 };
            Ok(Some(vec![div, flux]))
        });
        self.push("bach_divergence", used, cols[0], DIVERGENCE_TOL);
        if n == 3 {
            self.push("bach_flux", used, cols[1], DIVERGENCE_TOL);
        }
        if n >= 4 {
            let (cols, used) = self.scan(&self.points, 3, |p| {
                let pack = curvature_pack(s.chart.as_ref(), p, Depth::Bach)?;
                Ok(Some(vec![
                    pack.bach_forms_residual().unwrap_or(f64::NAN),
                    pack.bach_asymmetry().unwrap_or(f64::NAN),
                    pack.bach_trace().unwrap_or(f64::NAN),
                ]))
            });
            let tol = self.tol_default();
            self.push("bach_forms", used, cols[0], tol);
            // symmetry and trace-freeness are asserted in dimension 4 only
            if n == 4 {
                self.push("bach_symmetry", used, cols[1], ALGEBRAIC_TOL);
                self.push("bach_trace", used, cols[2], ALGEBRAIC_TOL);
            }
        }
    }

    fn level_geometry(&mut self) {
        let n = self.s.dim();
        let s = &self.s.clone();
        let steady = s.is_steady();
        let rotational = d_vanishes(&s.name);
        let (cols, used) = self.scan(&self.points, 3, |p| {
            let d2 = match check_d2(s, p) {
                Err(Error::CriticalPoint(_)) => return Ok(None),
                r => r?,
            };
            let lv = level_data(s, p)?;
            let h_forms = if steady {
                IdentityReport::max_of(lv.h.iter().zip(&lv.h_from_ricci).map(|(a, b)| a - b))
            } else {
                0.0
            };
            Ok(Some(vec![d2.residual, h_forms, lv.traceless_norm]))
        });
        self.push("d2_identity", used, cols[0], PROFILE_TOL);
        if steady {
            self.push("h_forms", used, cols[1], 1e-9);
        }
        if rotational {
            self.push("umbilicity", used, cols[2], 1e-9);
        }

        let battery = rotational || self.spec.expects_failure("prop32");
        let level = s
            .potential_jet(&s.radial_point(LEVEL_RADIUS), 0)
            .map(|j| j.value);
        if battery {
            let res = level
                .clone()
                .and_then(|c| prop32_battery(s, c, LEVEL_SAMPLES))
                .map(|r| r.max_residual())
                .unwrap_or(f64::NAN);
            self.push("prop32", LEVEL_SAMPLES, res, BATTERY_TOL);
        }
        if rotational && n >= 4 {
            match level.and_then(|c| einstein_fiber_check(s, c, LEVEL_SAMPLES)) {
                Ok(f) => {
                    self.push("fiber_formula", LEVEL_SAMPLES, f.formula_residual, BATTERY_TOL);
                    self.push("fiber_w1a1a", LEVEL_SAMPLES, f.w1a1a, BATTERY_TOL);
                    self.push("fiber_einstein", LEVEL_SAMPLES, f.einstein_defect, BATTERY_TOL);
                    if let Some(r) = f.round_fiber_defect {
                        self.push("fiber_round", LEVEL_SAMPLES, r, BATTERY_TOL);
                    }
                }
                Err(_) => self.push("fiber_formula", LEVEL_SAMPLES, f64::NAN, BATTERY_TOL),
            }
        }
        if let Some(prof) = s.profile.clone() {
            let radii: Vec<f64> = FLUX_RADII.iter().copied().filter(|&r| r < prof.rmax()).collect();
            let flux = radii
                .iter()
                .map(|&r| weighted_flux(s, r).map(|w| w.flux).unwrap_or(f64::NAN));
            self.push("weighted_flux", radii.len(), IdentityReport::max_of(flux), FLUX_TOL);
            // largest relative increase of the majorant along the scan
            let radii: Vec<f64> = MAJORANT_RADII.iter().copied().filter(|&r| r < prof.rmax()).collect();
            let res = match majorant_scan(s, &radii) {
                Ok((v, _)) => IdentityReport::max_of(
                    v.windows(2)
                        .map(|w| ((w[1].majorant - w[0].majorant) / w[0].majorant).max(0.0)),
                ),
                Err(_) => f64::NAN,
            };
            self.push("flux_majorant_monotone", radii.len(), res, 0.0);
        }
    }

    fn asymptotics(&mut self) {
        let prof = self.s.profile.clone().expect("checked by applicable");
        let nodes = prof.nodes().len();
        let a = match asymptotics(&prof) {
            Ok(a) => a,
            Err(_) => {
                self.push("asymptotics", nodes, f64::NAN, 0.0);
                return;
            }
        };
        let fit = a.potential_fit;
        let scale = if fit.quadratic { 1.0 } else { 1.0 + fit.c2.abs() };
        let bound = |holds: bool, v: f64| if holds { v / scale } else { f64::INFINITY };
        if prof.is_steady() {
            let nf = prof.n() as f64;
            self.push("volume_exponent", nodes, a.volume_exponent - (nf + 1.0) / 2.0, 0.15);
            self.push("decay_spread", nodes, if a.degenerate { f64::NAN } else { a.decay_spread }, 0.05);
            let c1 = if fit.c1 > 0.0 { (fit.c1 - 1.0).max(0.0) } else { f64::INFINITY };
            self.push("potential_c1", nodes, c1, ALGEBRAIC_TOL);
        } else {
            let worst = IdentityReport::max_of(prof.nodes().iter().map(|&r| {
                match (prof.warped_curvature(r), prof.state(r)) {
                    (Ok(c), Ok(y)) => (-c.ric_rr).max(-c.ric_sph / (y[0] * y[0])).max(0.0),
                    _ => f64::NAN,
                }
            }));
            self.push("ricci_nonneg", nodes, worst, CLOSED_FORM_TOL);
        }
        self.push("potential_lower", nodes, bound(fit.lower_holds, fit.lower_violation), 1e-9);
        self.push("potential_upper", nodes, bound(fit.upper_holds, fit.upper_violation), 1e-9);
        self.push("center_limit", 1, a.center_limit - 1.0, 1e-5);
    }

    fn brendle(&mut self) {
        let normalized = match normalize_steady(&self.s) {
            Ok(s) => s,
            Err(_) => {
                self.push("brendle_tables", 0, f64::NAN, 0.0);
                return;
            }
        };
        let prof = normalized.profile.clone().expect("profile-backed");
        match brendle_tables(&prof) {
            Ok(b) => {
                let m = b.s.len();
                self.push("scalar_monotone", prof.nodes().len(), if b.monotone { 0.0 } else { f64::NAN }, 0.0);
                let min_psi = b.psi.iter().copied().fold(f64::INFINITY, f64::min);
                self.push("psi_positive", m, if min_psi > 0.0 { 0.0 } else { f64::NAN }, 0.0);
                let finite = b.u.iter().all(|u| u.is_finite());
                self.push("u_finite", m, if finite { 0.0 } else { f64::NAN }, 0.0);
                self.push("x_residual", prof.nodes().len(), b.x_residual, FLUX_TOL);
            }
            Err(_) => self.push("scalar_monotone", prof.nodes().len(), f64::NAN, 0.0),
        }
        let radii: Vec<f64> = FLUX_RADII.iter().copied().filter(|&r| r < prof.rmax()).collect();
        let rel = |r: f64| -> Result<f64, Error> {
            let b = Brendle::new(&prof, 1.0)?;
            let u = b.u(prof.scalar(r)?)?;
            let scale = prof.sphere_area(r)? * u.exp() * prof.scalar_derivative(r)?.abs();
            Ok(b.flux(r)? / scale)
        };
        let relative = IdentityReport::max_of(radii.iter().map(|&r| rel(r).unwrap_or(f64::NAN)));
        self.push("asym_flux_relative", radii.len(), relative, FLUX_TOL);
        // the weight e^u grows like e^(c/R), so the absolute flux is only
        // meaningful in dimension 3
        if prof.n() == 3 {
            let flux = flux_scan(&prof, &radii, 1.0)
                .map(IdentityReport::max_of)
                .unwrap_or(f64::NAN);
            self.push("asym_flux", radii.len(), flux, FLUX_TOL);
        }
    }

    fn run_suite(&mut self, suite: &str) {
        match suite {
            "steady-identities" => self.steady_identities(),
            "conformal-tensors" => self.conformal_tensors(),
            "bach-divergence" => self.bach_divergence(),
            "level-geometry" => self.level_geometry(),
            "asymptotics" => self.asymptotics(),
            "brendle" => self.brendle(),
            other => unreachable!("unknown suite {other}"),
        }
    }
}

/// Runs a verification spec.
pub fn run(spec: &VerifySpec) -> Result<RunReport, ForgeError> {
    spec.validate()?;
    let s = model(&spec.model, &spec.resolved_params()).map_err(|e| {
        let msg = format!("cannot build model `{}`: {e}", spec.model);
        match e {
            Error::InvalidParams(_) | Error::UnknownModel(_) | Error::DimensionTooLow { .. } => ForgeError::Usage(msg),
            _ => ForgeError::Failure(msg),
        }
    })?;
    let suites: Vec<&str> = if spec.suite == "all" {
        SUITES[..SUITES.len() - 1]
            .iter()
            .copied()
            .filter(|x| applicable(x, &s).is_ok())
            .collect()
    } else {
        applicable(&spec.suite, &s).map_err(ForgeError::Usage)?;
        vec![spec.suite.as_str()]
    };
    let mut runner = Runner {
        spec,
        case: case_name(&s),
        points: sample_points(s.chart.as_ref(), spec.seed),
        s,
        pool: pool::build(),
        out: Vec::new(),
    };
    let mut timings = BTreeMap::new();
    for suite in suites {
        let t = Instant::now();
        runner.run_suite(suite);
        if spec.timings {
            timings.insert(suite.to_string(), t.elapsed().as_secs_f64());
        }
    }
    Ok(RunReport::new(spec.clone(), runner.out, timings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use soliton_core::soliton::ModelParams;

    #[test]
    fn applicability_and_case_names() {
        let cigar = model("cigar", &ModelParams::default()).unwrap();
        assert_eq!(case_name(&cigar), "cigar");
        assert!(applicable("steady-identities", &cigar).is_ok());
        assert!(applicable("bach-divergence", &cigar).is_err());
        assert!(applicable("asymptotics", &cigar).is_err());
        let flat = model("flat", &ModelParams::dim(4)).unwrap();
        assert_eq!(case_name(&flat), "flat(4)");
        assert!(applicable("level-geometry", &flat).is_err());
        let exp = model("expander", &ModelParams::dim(3).with_rmax(20.0)).unwrap();
        assert!(applicable("asymptotics", &exp).is_ok());
        assert!(applicable("brendle", &exp).is_err());
    }

    #[test]
    fn all_skips_inapplicable_suites_and_explicit_ones_are_usage_errors() {
        let r = run(&VerifySpec::new("cigar", ModelParams::default(), "all")).unwrap();
        assert!(r.overall_pass);
        assert!(r.reports.iter().all(|x| x.case == "cigar"));
        let e = run(&VerifySpec::new("cigar", ModelParams::default(), "brendle")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn point_errors_fail_the_report() {
        let spec = VerifySpec::new("cigar", ModelParams::default(), "steady-identities");
        let mut runner = Runner {
            spec: &spec,
            s: model("cigar", &ModelParams::default()).unwrap(),
            case: "cigar".into(),
            points: vec![ChartPoint::new([1e9, 0.0])],
            pool: pool::build(),
            out: Vec::new(),
        };
        runner.steady_identities();
        assert!(runner.out.iter().all(|r| !r.pass));
    }
}

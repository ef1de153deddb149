//! Acceptance suite. Runs every criterion sequentially, prints one line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use soliton_core::chart::{AnalyticWarp, MetricChart, PolynomialChart, WarpedChart};
use soliton_core::curvature::{self, curvature_pack, weyl_divergence_residual, Depth};
use soliton_core::level::{check_d2, einstein_fiber_check, majorant_scan, prop32_battery};
use soliton_core::soliton::{
    bach_flux_identity, check_bd, check_dcw, d_tensor_at, model, normalize_steady, sample_points, ModelParams,
    PointData, SolitonStructure, SAMPLE_SEED,
};
use soliton_core::tensor::contract_full;
use soliton_core::{ChartPoint, Error, IdentityReport, Tensor};
use soliton_forge::suites::{self, DIFFERENCED_POINTS};
use soliton_forge::{RunReport, VerifySpec};

/// Outcome of one criterion: the worst observed quantity per check.
struct Outcome {
    checks: Vec<(String, f64, f64, bool)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { checks: Vec::new() }
    }

    /// `value <= bound`.
    fn below(&mut self, what: impl Into<String>, value: f64, bound: f64) {
        let ok = value.is_finite() && value <= bound;
        self.checks.push((what.into(), value, bound, ok));
    }

    /// `value > bound`.
    fn above(&mut self, what: impl Into<String>, value: f64, bound: f64) {
        let ok = value.is_finite() && value > bound;
        self.checks.push((what.into(), value, bound, ok));
    }

    fn holds(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), if ok { 1.0 } else { 0.0 }, 1.0, ok));
    }

    /// Every report of a run passes (or fails when expected to).
    fn run(&mut self, r: &RunReport) {
        for rep in &r.reports {
            let expected = !r.spec.expects_failure(&rep.identity);
            self.checks.push((
                format!("{} {}", rep.case, rep.identity),
                rep.max_abs_residual,
                rep.tolerance,
                rep.pass == expected,
            ));
        }
        self.holds(format!("{} overall", r.spec.model), r.overall_pass);
    }

    fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.3)
    }
}

fn build(name: &str, params: ModelParams) -> SolitonStructure {
    model(name, &params).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn verify(name: &str, params: ModelParams, suite: &str) -> RunReport {
    suites::run(&VerifySpec::new(name, params, suite)).unwrap_or_else(|e| panic!("{name}/{suite}: {e}"))
}

fn norm(t: &Tensor, ginv: &Tensor) -> f64 {
    contract_full(t, t, ginv).max(0.0).sqrt()
}

fn polynomial(n: usize) -> PolynomialChart {
    PolynomialChart::random(n, 100 + n as u64)
}

fn c1_algebraic() -> Outcome {
    let mut o = Outcome::new();
    for n in 3..=5 {
        let chart = polynomial(n);
        let mut worst = [0.0f64; 5];
        for p in sample_points(&chart, SAMPLE_SEED) {
            let pack = curvature_pack(&chart, &p, Depth::Cotton).unwrap();
            let v = [
                pack.riemann_symmetry_residual(),
                pack.ricci_asymmetry(),
                pack.cotton_symmetry_residual().unwrap(),
                pack.weyl_trace_residual(),
                pack.weyl_decomposition_residual(),
            ];
            for (w, x) in worst.iter_mut().zip(v) {
                *w = IdentityReport::max_of([*w, x]);
            }
        }
        for (what, w) in ["riemann", "ricci", "cotton", "weyl_trace", "weyl_decomposition"].iter().zip(worst) {
            o.below(format!("n={n} {what}"), w, 1e-10);
        }
    }
    o
}

fn c2_cotton_weyl() -> Outcome {
    let mut o = Outcome::new();
    for n in [4, 5] {
        let chart = polynomial(n);
        let worst = IdentityReport::max_of(sample_points(&chart, SAMPLE_SEED).iter().map(|p| {
            weyl_divergence_residual(&curvature_pack(&chart, p, Depth::Cotton).unwrap())
        }));
        o.below(format!("n={n} cotton vs div W"), worst, 1e-10);
    }
    o
}

fn c3_divergence() -> Outcome {
    let mut o = Outcome::new();
    for n in [3, 5] {
        let chart = polynomial(n);
        let pts: Vec<ChartPoint> = sample_points(&chart, SAMPLE_SEED).into_iter().take(DIFFERENCED_POINTS).collect();
        let worst = IdentityReport::max_of(pts.iter().map(|p| curvature::bach_divergence_check(&chart, p).unwrap()));
        o.below(format!("n={n} div B"), worst, 1e-7);
    }
    let lc = build("line-cigar", ModelParams::default());
    let pts: Vec<ChartPoint> = lc.sample_points().into_iter().take(DIFFERENCED_POINTS).collect();
    let checks: Vec<_> = pts.iter().map(|p| bach_flux_identity(&lc, p).unwrap()).collect();
    o.below("line-cigar div(B).grad f + |C|^2/2", IdentityReport::max_of(checks.iter().map(|c| c.residual)), 1e-7);
    let min_c2 = checks.iter().map(|c| c.cotton_norm2).fold(f64::INFINITY, f64::min);
    o.above("line-cigar min |C|^2", min_c2, 1e-4);
    o
}

fn c4_soliton_battery() -> Outcome {
    let mut o = Outcome::new();
    let cases: Vec<(&str, ModelParams)> = vec![
        ("cigar", ModelParams::default()),
        ("line-cigar", ModelParams::default()),
        ("gaussian-expander", ModelParams::dim(3)),
        ("bryant", ModelParams::dim(3)),
        ("bryant", ModelParams::dim(4)),
        ("bryant", ModelParams::dim(5)),
        ("bryant", ModelParams::dim(6)),
        ("expander", ModelParams::dim(3)),
        ("expander", ModelParams::dim(4)),
    ];
    for (name, params) in cases {
        let r = verify(name, params, "steady-identities");
        let profile = matches!(name, "bryant" | "expander");
        for id in ["soliton_residual", "hamilton_grad_r", "hamilton_conservation", "scalar_nonneg"] {
            let rep = r.reports.iter().find(|x| x.identity == id);
            o.holds(format!("{name} reports {id}"), rep.is_some());
            if let Some(rep) = rep {
                let bound = if id == "scalar_nonneg" { 0.0 } else if profile { 1e-6 } else { 1e-8 };
                o.below(format!("{} {id}", rep.case), rep.max_abs_residual, bound);
            }
        }
        o.run(&r);
    }
    o
}

fn c5_d_relations() -> Outcome {
    let mut o = Outcome::new();
    let cases: Vec<(&str, ModelParams)> = vec![
        ("flat", ModelParams::dim(3)),
        ("gaussian-expander", ModelParams::dim(3)),
        ("line-cigar", ModelParams::default()),
        ("sphere-factor", ModelParams::dim(3)),
        ("bryant", ModelParams::dim(3)),
        ("bryant", ModelParams::dim(4)),
        ("bryant", ModelParams::dim(5)),
        ("bryant", ModelParams::dim(6)),
        ("expander", ModelParams::dim(3)),
        ("expander", ModelParams::dim(4)),
    ];
    for (name, params) in cases {
        let s = build(name, params);
        let case = suites::case_name(&s);
        let pts = s.sample_points();
        let dcw = IdentityReport::max_of(pts.iter().map(|p| check_dcw(&s, p).unwrap()));
        o.below(format!("{case} DCW"), dcw, 1e-6);
        let bd: Vec<_> = pts.iter().take(DIFFERENCED_POINTS).map(|p| check_bd(&s, p).unwrap()).collect();
        o.below(format!("{case} BD"), IdentityReport::max_of(bd.iter().map(|b| b.residual)), 1e-6);
        if name == "line-cigar" {
            let min_b = bd.iter().map(|b| b.bach_side).fold(f64::INFINITY, f64::min);
            let min_d = bd.iter().map(|b| b.d_side).fold(f64::INFINITY, f64::min);
            o.above("line-cigar min |(n-2)B|", min_b, 1e-4);
            o.above("line-cigar min |div D + C grad f|", min_d, 1e-4);
        }
    }
    o
}

fn c6_bach_flat() -> Outcome {
    let mut o = Outcome::new();
    for n in 3..=5 {
        let s = build("bryant", ModelParams::dim(n));
        for r in [0.5, 1.0, 5.0, 20.0] {
            let d = PointData::new(&s, &s.radial_point(r), Depth::Bach).unwrap();
            let g = &d.pack.ginv;
            o.below(format!("bryant({n}) r={r} |C|"), norm(d.pack.cotton(), g), 1e-6);
            o.below(format!("bryant({n}) r={r} |D|"), norm(&d_tensor_at(&d), g), 1e-6);
            if n >= 4 {
                o.below(format!("bryant({n}) r={r} |W|"), norm(&d.pack.weyl, g), 1e-6);
                o.below(format!("bryant({n}) r={r} |B|"), norm(d.pack.bach.as_ref().unwrap(), g), 1e-6);
            }
        }
    }
    o
}

fn c7_asymptotics(n: usize) -> Outcome {
    let mut o = Outcome::new();
    let r = verify("bryant", ModelParams::dim(n).with_rmax(1000.0), "asymptotics");
    let ids = ["volume_exponent", "decay_spread", "potential_c1", "potential_lower", "potential_upper", "center_limit"];
    for id in ids {
        o.holds(format!("bryant({n}) reports {id}"), r.reports.iter().any(|x| x.identity == id));
    }
    o.run(&r);
    o
}

fn c8_expanders() -> Outcome {
    let mut o = Outcome::new();
    for n in [3, 4] {
        for suite in ["steady-identities", "conformal-tensors", "asymptotics"] {
            o.run(&verify("expander", ModelParams::dim(n), suite));
        }
        let s = build("expander", ModelParams::dim(n));
        let prof = s.profile.clone().unwrap();
        let worst = prof
            .nodes()
            .iter()
            .map(|&r| {
                let c = prof.warped_curvature(r).unwrap();
                let w = prof.state(r).unwrap()[0];
                c.ric_rr.min(c.ric_sph / (w * w))
            })
            .fold(f64::INFINITY, f64::min);
        o.above(format!("expander({n}) min Ric"), worst, -1e-8);
    }
    o
}

fn c9_level() -> Outcome {
    let mut o = Outcome::new();
    let lc = build("line-cigar", ModelParams::default());
    let mut worst = 0.0f64;
    let mut min_side = f64::INFINITY;
    for p in lc.sample_points() {
        match check_d2(&lc, &p) {
            Ok(c) => {
                worst = IdentityReport::max_of([worst, c.residual]);
                min_side = min_side.min(c.lhs).min(c.rhs);
            }
            Err(Error::CriticalPoint(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    o.below("line-cigar D2 relative", worst, 1e-6);
    o.above("line-cigar D2 min side", min_side, 1e-4);
    let level = |s: &SolitonStructure| s.potential_jet(&s.radial_point(1.0), 0).unwrap().value;
    for (name, n) in [("bryant", 3), ("expander", 4)] {
        let s = build(name, ModelParams::dim(n));
        let rep = prop32_battery(&s, level(&s), 8).unwrap();
        o.below(format!("{name}({n}) prop32"), rep.max_residual(), 1e-6);
    }
    for n in [4, 5] {
        let s = build("bryant", ModelParams::dim(n));
        let f = einstein_fiber_check(&s, level(&s), 8).unwrap();
        o.below(format!("bryant({n}) fiber formula"), f.formula_residual, 1e-6);
        o.below(format!("bryant({n}) W_1a1a"), f.w1a1a, 1e-6);
        o.below(format!("bryant({n}) fiber Einstein"), f.einstein_defect, 1e-6);
    }
    let neg = prop32_battery(&lc, level(&lc), 8).unwrap();
    o.holds("line-cigar prop32 fails", !neg.pass);
    o.run(&verify("line-cigar", ModelParams::default(), "level-geometry"));
    o
}

fn c10_brendle() -> Outcome {
    let mut o = Outcome::new();
    let r = verify("bryant", ModelParams::dim(3), "brendle");
    for id in ["scalar_monotone", "psi_positive", "u_finite", "x_residual", "asym_flux"] {
        o.holds(format!("reports {id}"), r.reports.iter().any(|x| x.identity == id));
    }
    o.run(&r);
    let s = normalize_steady(&build("bryant", ModelParams::dim(3).with_rmax(1000.0))).unwrap();
    let (scan, decreasing) = majorant_scan(&s, &[10.0, 20.0, 40.0, 80.0, 160.0]).unwrap();
    o.holds("majorant decreasing for r >= 10", decreasing && scan.windows(2).all(|w| w[1].majorant < w[0].majorant));
    o
}

fn warped_rel_error(chart: &dyn MetricChart, n: usize, r: f64, w: [f64; 3]) -> f64 {
    let nf = n as f64;
    let rr = -(nf - 1.0) * w[2] / w[0];
    let sph = (nf - 2.0) * (1.0 - w[1] * w[1]) - w[0] * w[2];
    let sc = -2.0 * (nf - 1.0) * w[2] / w[0] + (nf - 1.0) * (nf - 2.0) * (1.0 - w[1] * w[1]) / (w[0] * w[0]);
    let pack = curvature_pack(chart, &WarpedChart::equator(n, r), Depth::Riemann).unwrap();
    let scale = rr.abs().max(sc.abs()).max(1e-300);
    let mut e = (pack.ric.at2(0, 0) - rr).abs() / scale;
    for a in 1..n {
        e = e.max((pack.ric.at2(a, a) - sph).abs() / sph.abs().max(w[0] * w[0] * scale));
    }
    e.max((pack.scalar - sc).abs() / scale)
}

/// Label, warp and `(w, w', w'')` in closed form.
type WarpCase = (&'static str, AnalyticWarp, fn(f64) -> [f64; 3]);

fn c11_engine() -> Outcome {
    let mut o = Outcome::new();
    let cases: [WarpCase; 3] = [
        ("sin", AnalyticWarp::Sine, |r| [r.sin(), r.cos(), -r.sin()]),
        ("sinh", AnalyticWarp::Sinh, |r| [r.sinh(), r.cosh(), r.sinh()]),
        ("cubic", AnalyticWarp::Cubic(-0.05), |r| [r - 0.05 * r.powi(3), 1.0 - 0.15 * r * r, -0.3 * r]),
    ];
    for n in 3..=6 {
        for (label, warp, w) in cases {
            let chart = WarpedChart::new(n, Arc::new(warp));
            let worst = IdentityReport::max_of(
                (1..=24).map(|k| 0.125 * k as f64).map(|r| warped_rel_error(&chart, n, r, w(r))),
            );
            o.below(format!("n={n} {label}"), worst, 1e-9);
        }
    }
    for (name, n) in [("bryant", 3), ("bryant", 5), ("expander", 4)] {
        let s = build(name, ModelParams::dim(n));
        let prof = s.profile.clone().unwrap();
        let worst = IdentityReport::max_of(prof.nodes().iter().filter(|&&r| r < prof.rmax()).map(|&r| {
            let y = prof.state(r).unwrap();
            let v1 = soliton_core::profile::rhs(n, prof.rho(), &y)[1];
            warped_rel_error(s.chart.as_ref(), n, r, [y[0], y[1], v1])
        }));
        o.below(format!("{name}({n}) all nodes"), worst, 1e-6);
    }
    o
}

fn c12_determinism() -> Outcome {
    let mut o = Outcome::new();
    let specs = [
        VerifySpec::new("cigar", ModelParams::default(), "all"),
        VerifySpec::new("line-cigar", ModelParams::default(), "level-geometry"),
        VerifySpec::new("bryant", ModelParams::dim(3), "all"),
    ];
    for spec in specs {
        let a = suites::run(&spec).unwrap().to_json();
        let b = suites::run(&spec).unwrap().to_json();
        o.holds(format!("{} {} byte-identical", spec.model, spec.suite), a == b);
    }
    o
}

type Criterion = (u32, &'static str, f64, Box<dyn Fn() -> Outcome>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "algebraic tensor identities on polynomial charts", 10.0, Box::new(c1_algebraic)),
        (2, "Cotton as Weyl divergence, n = 4, 5", 10.0, Box::new(c2_cotton_weyl)),
        (3, "Bach divergence identities", 60.0, Box::new(c3_divergence)),
        (4, "soliton identity battery", 60.0, Box::new(c4_soliton_battery)),
        (5, "D-tensor relations", 30.0, Box::new(c5_d_relations)),
        (6, "Bryant Bach-flatness", 60.0, Box::new(c6_bach_flat)),
        (7, "Bryant asymptotics, n = 3", 120.0, Box::new(|| c7_asymptotics(3))),
        (7, "Bryant asymptotics, n = 4", 120.0, Box::new(|| c7_asymptotics(4))),
        (8, "expanding profiles", 120.0, Box::new(c8_expanders)),
        (9, "level geometry", 60.0, Box::new(c9_level)),
        (10, "Brendle data", 60.0, Box::new(c10_brendle)),
        (11, "engine cross-validation", 30.0, Box::new(c11_engine)),
        (12, "determinism", f64::INFINITY, Box::new(c12_determinism)),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, what, limit, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        let ok = outcome.pass() && secs < limit;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id:2} {} {what} ({} checks, {secs:.1} s{})",
            if ok { "PASS" } else { "FAIL" },
            outcome.checks.len(),
            if limit.is_finite() { format!(" < {limit} s") } else { String::new() },
        );
        for (name, value, bound, _) in outcome.checks.iter().filter(|c| !c.3) {
            println!("    failed {name}: {value:e} against {bound:e}");
        }
        if secs >= limit {
            println!("    runtime {secs:.1} s exceeds {limit} s");
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

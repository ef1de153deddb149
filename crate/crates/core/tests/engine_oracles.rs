//! Curvature engine against closed forms and finite-difference oracles
//! computed independently of the jet pipeline.

use std::sync::Arc;

use soliton_core::chart::{
    metric_jet, AnalyticWarp, ConformalChart, FlatChart, MetricChart, Polynomial, PolynomialChart,
    WarpedChart,
};
use soliton_core::curvature::{curvature_pack, Depth};
use soliton_core::linalg;
use soliton_core::soliton::{model, sample_points, ModelParams, SAMPLE_SEED};
use soliton_core::{ChartPoint, Tensor};

fn metric_at(chart: &dyn MetricChart, c: &[f64]) -> Tensor {
    metric_jet(chart, &ChartPoint::new(c.to_vec()), 0).unwrap().g()
}

/// Christoffel symbols of the second kind from central differences of `g`.
fn fd_christoffel(chart: &dyn MetricChart, c: &[f64], h: f64) -> Tensor {
    let n = c.len();
    let dg: Vec<Tensor> = (0..n)
        .map(|k| {
            let mut a = c.to_vec();
            let mut b = c.to_vec();
            a[k] += h;
            b[k] -= h;
            let (ga, gb) = (metric_at(chart, &a), metric_at(chart, &b));
            Tensor::from_fn(n, 2, |x| (ga.at2(x[0], x[1]) - gb.at2(x[0], x[1])) / (2.0 * h))
        })
        .collect();
    let ginv = Tensor {
        n,
        rank: 2,
        data: linalg::spd_inverse(n, &metric_at(chart, c).data).unwrap(),
    };
    Tensor::from_fn(n, 3, |x| {
        let (m, i, j) = (x[0], x[1], x[2]);
        (0..n)
            .map(|l| 0.5 * ginv.at2(m, l) * (dg[i].at2(j, l) + dg[j].at2(i, l) - dg[l].at2(i, j)))
            .sum()
    })
}

#[test]
fn christoffels_match_finite_differences_on_polynomial_charts() {
    for (n, seed) in [(3usize, 11u64), (4, 12), (5, 13)] {
        let chart = PolynomialChart::random(n, seed);
        for p in sample_points(&chart, SAMPLE_SEED).iter().take(4) {
            let pack = curvature_pack(&chart, p, Depth::Riemann).unwrap();
            let fd = fd_christoffel(&chart, &p.coords, 1e-4);
            let err = pack.gamma.max_abs_diff(&fd);
            assert!(err < 1e-7, "n = {n}: christoffel mismatch {err:e}");
        }
    }
}

#[test]
fn two_dimensional_conformal_scalar_curvature() {
    // g = e^{2 phi} delta has R = -2 e^{-2 phi} (phi_xx + phi_yy)
    let phi = Polynomial {
        terms: vec![(0.1, vec![2, 0]), (-0.05, vec![1, 1]), (0.2, vec![0, 3])],
    };
    let chart = ConformalChart {
        base: Arc::new(FlatChart::new(2)),
        phi: phi.clone(),
    };
    for p in sample_points(&chart, 3).iter() {
        let (x, y) = (p.coords[0], p.coords[1]);
        let lap = 0.2 + 1.2 * y;
        let want = -2.0 * (-2.0 * phi.eval_f64(&[x, y])).exp() * lap;
        let got = curvature_pack(&chart, p, Depth::Riemann).unwrap().scalar;
        assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn conformally_flat_charts_have_no_weyl_or_cotton() {
    let phi = Polynomial {
        terms: vec![(0.2, vec![1, 1, 0, 0]), (-0.1, vec![0, 0, 2, 0]), (0.05, vec![0, 1, 1, 1])],
    };
    let chart4 = ConformalChart {
        base: Arc::new(FlatChart::new(4)),
        phi,
    };
    let p = ChartPoint::new([0.3, -0.2, 0.4, 0.1]);
    let pack = curvature_pack(&chart4, &p, Depth::Cotton).unwrap();
    assert!(pack.riem.max_abs() > 1e-2);
    assert!(pack.weyl.max_abs() < 1e-12);
    assert!(pack.cotton().max_abs() < 1e-11);

    let phi3 = Polynomial {
        terms: vec![(0.3, vec![2, 1, 0]), (-0.2, vec![0, 0, 3])],
    };
    let chart3 = ConformalChart {
        base: Arc::new(FlatChart::new(3)),
        phi: phi3,
    };
    let pack = curvature_pack(&chart3, &ChartPoint::new([0.2, 0.5, -0.3]), Depth::Cotton).unwrap();
    assert!(pack.ric.max_abs() > 1e-2);
    assert!(pack.cotton().max_abs() < 1e-11);
}

fn warped_closed_form(n: usize, w: [f64; 3]) -> (f64, f64, f64) {
    let nf = n as f64;
    let (w0, w1, w2) = (w[0], w[1], w[2]);
    let ric_rr = -(nf - 1.0) * w2 / w0;
    let ric_sph = (nf - 2.0) * (1.0 - w1 * w1) - w0 * w2;
    let scalar = -2.0 * (nf - 1.0) * w2 / w0 + (nf - 1.0) * (nf - 2.0) * (1.0 - w1 * w1) / (w0 * w0);
    (ric_rr, ric_sph, scalar)
}

#[test]
fn analytic_warped_charts_match_closed_forms() {
    let cases: [(AnalyticWarp, fn(f64) -> [f64; 3]); 3] = [
        (AnalyticWarp::Sine, |r| [r.sin(), r.cos(), -r.sin()]),
        (AnalyticWarp::Sinh, |r| [r.sinh(), r.cosh(), r.sinh()]),
        (AnalyticWarp::Cubic(-0.05), |r| [r - 0.05 * r.powi(3), 1.0 - 0.15 * r * r, -0.3 * r]),
    ];
    for n in 3..=5 {
        for (warp, w) in cases {
            let chart = WarpedChart::new(n, Arc::new(warp));
            for r in [0.3, 0.9, 1.7] {
                let pack = curvature_pack(&chart, &WarpedChart::equator(n, r), Depth::Riemann).unwrap();
                let (rr, sph, sc) = warped_closed_form(n, w(r));
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                assert!(rel(pack.ric.at2(0, 0), rr) < 1e-9);
                for a in 1..n {
                    assert!(rel(pack.ric.at2(a, a), sph) < 1e-9);
                }
                assert!(rel(pack.scalar, sc) < 1e-9);
            }
        }
    }
}

#[test]
fn round_sphere_is_einstein() {
    for n in 3..=5 {
        let chart = WarpedChart::new(n, Arc::new(AnalyticWarp::Sine));
        let p = ChartPoint::new({
            let mut c = vec![1.1; n];
            c[n - 1] = 0.4;
            c
        });
        let pack = curvature_pack(&chart, &p, Depth::Cotton).unwrap();
        let k = (n - 1) as f64;
        assert!(pack.ric.max_abs_diff(&pack.g.scaled(k)) < 1e-10);
        assert!((pack.scalar - k * n as f64).abs() < 1e-10);
        assert!(pack.weyl.max_abs() < 1e-10);
    }
}

#[test]
fn cigar_and_line_cigar_curvature() {
    let cigar = model("cigar", &ModelParams::default()).unwrap();
    for p in cigar.sample_points() {
        let (x, y) = (p.coords[0], p.coords[1]);
        let pack = curvature_pack(cigar.chart.as_ref(), &p, Depth::Riemann).unwrap();
        let want = 4.0 / (1.0 + x * x + y * y);
        assert!((pack.scalar - want).abs() < 1e-13);
    }
    let lc = model("line-cigar", &ModelParams::default()).unwrap();
    for p in lc.sample_points() {
        let (x, y) = (p.coords[1], p.coords[2]);
        let pack = curvature_pack(lc.chart.as_ref(), &p, Depth::Riemann).unwrap();
        let k = 2.0 / (1.0 + x * x + y * y);
        assert!((pack.scalar - 2.0 * k).abs() < 1e-13);
        for i in 0..3 {
            assert!(pack.ric.at2(0, i).abs() < 1e-13);
        }
        let want = Tensor::from_fn(3, 2, |ix| if ix[0] == 0 || ix[1] == 0 { 0.0 } else { k * pack.g.at2(ix[0], ix[1]) });
        assert!(pack.ric.max_abs_diff(&want) < 1e-13);
    }
}

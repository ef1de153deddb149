//! Property tests for the engine, model and report invariants.

use proptest::prelude::*;

use soliton_core::chart::{metric_jet, PolynomialChart};
use soliton_core::curvature::{curvature_pack, Depth};
use soliton_core::level::{adapted_frame, check_d2};
use soliton_core::profile::{integrate_profile, STEADY};
use soliton_core::soliton::{
    d_tensor, halton_points, model, normalize_steady, soliton_residual, ModelParams, PointData,
};
use soliton_core::{ChartPoint, IdentityReport};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn unit_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn polynomial_chart_algebraic_identities(n in 3usize..=5, seed in any::<u64>(), u in unit_point(5)) {
        let chart = PolynomialChart::random(n, seed);
        let p = ChartPoint::new(u[..n].iter().map(|x| 0.45 * x).collect::<Vec<_>>());
        let pack = curvature_pack(&chart, &p, Depth::Cotton).unwrap();
        prop_assert!(pack.riemann_symmetry_residual() < 1e-10);
        prop_assert!(pack.ricci_asymmetry() < 1e-10);
        prop_assert!(pack.weyl_trace_residual() < 1e-10);
        prop_assert!(pack.weyl_decomposition_residual() < 1e-10);
        prop_assert!(pack.cotton_symmetry_residual().unwrap() < 1e-10);
        prop_assert!(pack.cotton_forms_residual().unwrap() < 1e-10);
    }

    #[test]
    fn metric_jets_are_bit_reproducible(seed in any::<u64>(), u in unit_point(4)) {
        let chart = PolynomialChart::random(4, seed);
        let p = ChartPoint::new(u.iter().map(|x| 0.4 * x).collect::<Vec<_>>());
        let a = metric_jet(&chart, &p, 4).unwrap();
        let b = metric_jet(&chart, &p, 4).unwrap();
        prop_assert_eq!(a.d4g().data, b.d4g().data);
    }

    #[test]
    fn d_tensor_symmetries(slope in -2.0f64..2.0, u in unit_point(3), n in 3usize..=5) {
        let lc = model("line-cigar", &ModelParams { slope: Some(slope), ..Default::default() }).unwrap();
        let p = ChartPoint::new(u.iter().map(|x| 2.0 * x).collect::<Vec<_>>());
        let d = d_tensor(&lc, &p).unwrap();
        let ginv = curvature_pack(lc.chart.as_ref(), &p, Depth::Riemann).unwrap().ginv;
        prop_assert!(d.symmetry_residual(&ginv) < 1e-11);
        prop_assert!(soliton_residual(&lc, &p).unwrap() < 1e-12);

        let g = model("gaussian-expander", &ModelParams::dim(n)).unwrap();
        let q = ChartPoint::new(vec![0.7; n]);
        prop_assert!(d_tensor(&g, &q).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn adapted_frames_are_orthonormal(slope in -1.0f64..1.0, u in unit_point(3)) {
        let lc = model("line-cigar", &ModelParams { slope: Some(slope), ..Default::default() }).unwrap();
        let c: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        let p = ChartPoint::new(c);
        let d = PointData::new(&lc, &p, Depth::Riemann).unwrap();
        prop_assume!(d.grad_norm2() > 1e-6);
        let frame = adapted_frame(&lc, &p).unwrap();
        prop_assert!(frame.orthonormality_residual(&d.pack.g) < 1e-11);
        // e_1 is the unit gradient
        let norm = d.grad_norm2().sqrt();
        for i in 0..3 {
            prop_assert!((frame.vectors[0][i] - d.grad_up.data[i] / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn d2_identity_on_line_cigar(u in unit_point(3)) {
        let lc = model("line-cigar", &ModelParams::default()).unwrap();
        let p = ChartPoint::new(vec![u[0], 0.3 + 1.5 * u[1].abs(), 1.5 * u[2]]);
        let c = check_d2(&lc, &p).unwrap();
        prop_assert!(c.residual < 1e-6);
    }

    #[test]
    fn halton_grids_are_deterministic_and_bounded(seed in any::<u64>(), count in 1usize..64, lo in -3.0f64..0.0, w in 0.1f64..4.0) {
        let bounds = vec![(lo, lo + w), (0.0, 1.0), (-w, w)];
        let a = halton_points(&bounds, seed, count);
        prop_assert_eq!(&a, &halton_points(&bounds, seed, count));
        prop_assert_eq!(a.len(), count);
        for p in &a {
            for (x, (l, h)) in p.coords.iter().zip(&bounds) {
                prop_assert!(*x >= *l && *x <= *h);
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(slope in -2.0f64..2.0, u in unit_point(3)) {
        let lc = model("line-cigar", &ModelParams { slope: Some(slope), ..Default::default() }).unwrap();
        let once = normalize_steady(&lc).unwrap();
        let twice = normalize_steady(&once).unwrap();
        prop_assert_eq!(once.c0, Some(1.0));
        let p = ChartPoint::new(u.clone());
        let g1 = metric_jet(once.chart.as_ref(), &p, 2).unwrap().d2g();
        let g2 = metric_jet(twice.chart.as_ref(), &p, 2).unwrap().d2g();
        prop_assert_eq!(g1.data, g2.data);
    }

    #[test]
    fn report_pass_flag_and_json(res in -1e3f64..1e3, tol in 1e-14f64..1.0) {
        let r = IdentityReport::new("case", "identity", 3, 8, res, tol);
        prop_assert_eq!(r.pass, res.abs() <= tol);
        let back: IdentityReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}

proptest! {
    #![proptest_config(cfg(6))]

    #[test]
    fn steady_profiles_keep_their_invariants(n in 3usize..=5, a in -1.5f64..-0.05) {
        let p = integrate_profile(n, a, STEADY, 30.0, 1e-10).unwrap();
        prop_assert!(p.invariants_hold());
        for (&r, y) in p.nodes().iter().zip(p.node_states()).step_by(13) {
            prop_assert_eq!(p.state(r).unwrap(), *y);
            prop_assert!(y[0] > 0.0 && y[1] > 0.0 && y[1] <= 1.0 && y[3] < 0.0);
        }
    }
}

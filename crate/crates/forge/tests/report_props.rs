use std::collections::BTreeMap;

use proptest::prelude::*;
use soliton_core::soliton::ModelParams;
use soliton_core::IdentityReport;
use soliton_forge::{RunReport, VerifySpec};

const IDS: [&str; 4] = ["soliton_residual", "prop32", "dcw", "bd"];

fn report() -> impl Strategy<Value = IdentityReport> {
    (0..IDS.len(), 1usize..7, 0usize..200, prop_oneof![Just(0.0), -1e3f64..1e3, Just(f64::NAN)], 1e-12f64..1.0)
        .prop_map(|(i, dim, points, res, tol)| IdentityReport::new("case", IDS[i], dim, points, res, tol))
}

proptest! {
    #[test]
    fn overall_pass_matches_member_reports(
        reports in prop::collection::vec(report(), 0..12),
        negative in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut spec = VerifySpec::new("bryant", ModelParams::dim(3), "all");
        spec.seed = seed;
        if negative {
            spec.expected_failures.push("prop32".into());
        }
        let run = RunReport::new(spec.clone(), reports.clone(), BTreeMap::new());
        let want = !reports.is_empty()
            && reports.iter().all(|r| if spec.expects_failure(&r.identity) { !r.pass } else { r.pass });
        prop_assert_eq!(run.overall_pass, want);

        let back: RunReport = serde_json::from_str(&run.to_json()).unwrap();
        prop_assert_eq!(&back, &run);
        prop_assert_eq!(back.to_json(), run.to_json());
        prop_assert_eq!(back.spec.seed, seed);
    }
}

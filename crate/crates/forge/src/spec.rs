//! Run specifications and run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use soliton_core::soliton::{ModelParams, MODEL_NAMES, SAMPLE_SEED};
use soliton_core::IdentityReport;

use crate::ForgeError;

pub const SUITES: [&str; 7] = [
    "steady-identities",
    "conformal-tensors",
    "bach-divergence",
    "level-geometry",
    "asymptotics",
    "brendle",
    "all",
];

/// `rmax` used for steady profiles when a suite needs the asymptotic regime.
pub const ASYMPTOTIC_RMAX: f64 = 1000.0;

/// What to run and how.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySpec {
    pub model: String,
    #[serde(default)]
    pub params: ModelParams,
    pub suite: String,
    /// Per-identity tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Identities expected to fail (negative controls).
    #[serde(default)]
    pub expected_failures: Vec<String>,
    /// Record wall-clock time per suite (makes the output nondeterministic).
    #[serde(default)]
    pub timings: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_seed() -> u64 {
    SAMPLE_SEED
}

impl VerifySpec {
    /// A spec with the default seed and the registry's negative controls.
    pub fn new(model: &str, params: ModelParams, suite: &str) -> Self {
        let expected_failures = if model == "line-cigar" {
            vec!["prop32".to_string()]
        } else {
            Vec::new()
        };
        VerifySpec {
            model: model.to_string(),
            params,
            suite: suite.to_string(),
            tolerances: BTreeMap::new(),
            seed: SAMPLE_SEED,
            expected_failures,
            timings: false,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<(), ForgeError> {
        if !MODEL_NAMES.contains(&self.model.as_str()) {
            return Err(ForgeError::Usage(format!(
                "unknown model `{}` (expected one of {})",
                self.model,
                MODEL_NAMES.join(", ")
            )));
        }
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(ForgeError::Usage(format!(
                "unknown suite `{}` (expected one of {})",
                self.suite,
                SUITES.join(", ")
            )));
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v > 0.0) {
                return Err(ForgeError::Usage(format!("tolerance for `{k}` must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Model parameters after suite-dependent defaults.
    pub fn resolved_params(&self) -> ModelParams {
        let mut p = self.params;
        let long = matches!(self.suite.as_str(), "asymptotics" | "brendle" | "all");
        if long && self.model == "bryant" && p.rmax.is_none() {
            p.rmax = Some(ASYMPTOTIC_RMAX);
        }
        p
    }

    pub fn tolerance(&self, identity: &str, default: f64) -> f64 {
        self.tolerances.get(identity).copied().unwrap_or(default)
    }

    pub fn expects_failure(&self, identity: &str) -> bool {
        self.expected_failures.iter().any(|e| e == identity)
    }
}

/// Result of one `verify` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub spec: VerifySpec,
    pub reports: Vec<IdentityReport>,
    /// Every report passes, except negative controls, which must fail.
    pub overall_pass: bool,
    /// Seconds per suite; empty unless the spec asks for timings.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(spec: VerifySpec, reports: Vec<IdentityReport>, timings: BTreeMap<String, f64>) -> Self {
        let overall_pass = !reports.is_empty()
            && reports
                .iter()
                .all(|r| r.pass != spec.expects_failure(&r.identity));
        RunReport {
            tool_version: crate::TOOL_VERSION.to_string(),
            spec,
            reports,
            overall_pass,
            timings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_failures_invert_the_pass_logic() {
        let spec = VerifySpec::new("line-cigar", ModelParams::default(), "level-geometry");
        let ok = IdentityReport::new("line-cigar", "d2_identity", 3, 16, 1e-12, 1e-6);
        let neg = IdentityReport::new("line-cigar", "prop32", 3, 8, 0.9, 1e-6);
        assert!(RunReport::new(spec.clone(), vec![ok.clone(), neg.clone()], BTreeMap::new()).overall_pass);
        let passing_neg = IdentityReport::new("line-cigar", "prop32", 3, 8, 1e-9, 1e-6);
        assert!(!RunReport::new(spec.clone(), vec![ok, passing_neg], BTreeMap::new()).overall_pass);
        assert!(!RunReport::new(spec, vec![], BTreeMap::new()).overall_pass);
    }

    #[test]
    fn validation() {
        assert!(VerifySpec::new("bryant", ModelParams::default(), "all").validate().is_ok());
        assert!(VerifySpec::new("torus", ModelParams::default(), "all").validate().is_err());
        assert!(VerifySpec::new("cigar", ModelParams::default(), "everything").validate().is_err());
        let mut s = VerifySpec::new("cigar", ModelParams::default(), "all");
        s.tolerances.insert("soliton_residual".into(), -1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn spec_json_round_trip_with_defaults() {
        let s: VerifySpec = serde_json::from_str(r#"{"model":"cigar","suite":"steady-identities"}"#).unwrap();
        assert_eq!(s.seed, SAMPLE_SEED);
        assert_eq!(serde_json::from_str::<VerifySpec>(&serde_json::to_string(&s).unwrap()).unwrap(), s);
    }
}

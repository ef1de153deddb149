//! Identity reports shared by the verification suites.

use alloc::string::String;

use serde::{Deserialize, Serialize};

/// Outcome of one identity over a set of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub case: String,
    pub identity: String,
    pub dim: usize,
    /// Number of evaluation points.
    pub points: usize,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// A report whose pass flag is `residual <= tolerance`.
    ///
    /// Non-finite residuals are stored as `f64::MAX` and fail.
    pub fn new(
        case: impl Into<String>,
        identity: impl Into<String>,
        dim: usize,
        points: usize,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let finite = residual.is_finite();
        let max_abs_residual = if finite { residual.abs() } else { f64::MAX };
        IdentityReport {
            case: case.into(),
            identity: identity.into(),
            dim,
            points,
            max_abs_residual,
            tolerance,
            pass: finite && max_abs_residual <= tolerance,
        }
    }

    /// Largest residual over an iterator; NaN anywhere poisons the result.
    pub fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
        let mut m = 0.0f64;
        for v in values {
            let a = v.abs();
            if a.is_nan() {
                return f64::NAN;
            }
            m = m.max(a);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        assert!(IdentityReport::new("c", "i", 3, 1, 1e-9, 1e-8).pass);
        assert!(!IdentityReport::new("c", "i", 3, 1, 1e-7, 1e-8).pass);
        let r = IdentityReport::new("c", "i", 3, 1, f64::NAN, 1e-8);
        assert!(!r.pass);
        assert_eq!(r.max_abs_residual, f64::MAX);
    }

    #[test]
    fn json_round_trip() {
        let r = IdentityReport::new("bryant(3)", "soliton_residual", 3, 16, 1.2345678901234567e-13, 1e-6);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<IdentityReport>(&s).unwrap(), r);
    }

    #[test]
    fn max_of_propagates_nan() {
        assert_eq!(IdentityReport::max_of([1.0, -3.0, 2.0]), 3.0);
        assert!(IdentityReport::max_of([1.0, f64::NAN]).is_nan());
        assert_eq!(IdentityReport::max_of([]), 0.0);
    }
}

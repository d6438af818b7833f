use serde::{Deserialize, Serialize};

use crate::error::Hypothesis;
use crate::model::ValidationReport;

/// Default reading of `a ≪ b` as `a/b ≤ 0.1`.
pub const DEFAULT_MARGIN: f64 = 0.1;

/// One inequality `small ≪ large` and its measured ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaCondition {
    pub name: &'static str,
    pub ratio: f64,
    pub passed: bool,
}

/// Verdicts on `max(ν_h, ε¹⁰, ν_h^{2/3} ε²) ≪ δ ≪ ε^{6/11}` and `ν_h ≪ ε`.
pub fn check_delta_conditions(
    epsilon: f64,
    nu_h: f64,
    delta: f64,
    margin: f64,
) -> Vec<DeltaCondition> {
    let pairs: [(&'static str, f64, f64); 5] = [
        ("epsilon_pow10_below_delta", epsilon.powi(10), delta),
        ("nu_h_below_delta", nu_h, delta),
        (
            "viscous_scale_below_delta",
            nu_h.powf(2.0 / 3.0) * epsilon * epsilon,
            delta,
        ),
        (
            "delta_below_epsilon_pow6_11",
            delta,
            epsilon.powf(6.0 / 11.0),
        ),
        ("nu_h_below_epsilon", nu_h, epsilon),
    ];
    pairs
        .into_iter()
        .map(|(name, small, large)| {
            let ratio = small / large;
            DeltaCondition {
                name,
                ratio,
                passed: ratio <= margin,
            }
        })
        .collect()
}

/// The same verdicts as a validation report.
pub fn delta_report(epsilon: f64, nu_h: f64, delta: f64, margin: f64) -> ValidationReport {
    let mut report = ValidationReport::new("delta_conditions");
    for c in check_delta_conditions(epsilon, nu_h, delta, margin) {
        report.push(
            Hypothesis::DeltaConditions,
            c.name,
            c.passed,
            format!("ratio {:.3e} against margin {margin}", c.ratio),
            None,
            Some(c.ratio),
        );
    }
    report
}

use serde::{Deserialize, Serialize};

use super::report::{residual_report, ResidualReport};
use crate::error::{Error, Result};
use crate::interior::{assemble_stationary, AssemblyOptions, SizeNorms};
use crate::model::{CoriolisProfile, Grid, Parameters, WindStress};
use crate::numerics::{fit_power_law, strictly_decreasing, PowerLawFit};

/// `coefficient · ε^exponent`, used for `δ(ε)` and `ν_h(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerRule {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerRule {
    pub const fn new(coefficient: f64, exponent: f64) -> Self {
        Self {
            coefficient,
            exponent,
        }
    }

    pub fn at(&self, epsilon: f64) -> f64 {
        self.coefficient * epsilon.powf(self.exponent)
    }
}

/// Everything a scaling study needs besides the list of Rossby numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyTemplate {
    pub coriolis: CoriolisProfile,
    pub stress: WindStress,
    pub grid: Grid,
    pub alpha: f64,
    #[serde(default = "default_delta")]
    pub delta: PowerRule,
    #[serde(default = "default_nu")]
    pub nu_h: PowerRule,
    #[serde(default)]
    pub options: AssemblyOptions,
    /// Allowed distance of the size slopes from their expected values.
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
}

fn default_delta() -> PowerRule {
    PowerRule::new(1.0, 1.0)
}

fn default_nu() -> PowerRule {
    PowerRule::new(1.0, 3.0)
}

fn default_slope_tolerance() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEntry {
    pub quantity: &'static str,
    #[serde(flatten)]
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingStudy {
    pub epsilons: Vec<f64>,
    pub delta_rule: PowerRule,
    pub nu_rule: PowerRule,
    pub reports: Vec<ResidualReport>,
    pub sizes: Vec<SizeNorms>,
    pub slopes: Vec<SlopeEntry>,
    pub verdicts: Vec<Verdict>,
}

impl ScalingStudy {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn slope(&self, quantity: &str) -> Option<&PowerLawFit> {
        self.slopes
            .iter()
            .find(|s| s.quantity == quantity)
            .map(|s| &s.fit)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Assembles `u^stat` for each `ε`, measures its residuals and sizes, and
/// fits log-log slopes against `ε`.
pub fn scaling_study(template: &StudyTemplate, epsilons: &[f64]) -> Result<ScalingStudy> {
    if epsilons.len() < 3 {
        return Err(Error::parameter(
            "epsilons",
            "a scaling study needs at least three values",
        ));
    }
    if !strictly_decreasing(epsilons) {
        return Err(Error::parameter(
            "epsilons",
            "values must be strictly decreasing",
        ));
    }
    let mut reports = Vec::with_capacity(epsilons.len());
    let mut sizes = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let params = Parameters::distinguished(
            eps,
            template.nu_h.at(eps),
            template.delta.at(eps),
            template.alpha,
        )?;
        let sol = assemble_stationary(
            &params,
            &template.coriolis,
            &template.stress,
            &template.grid,
            &template.options,
        )?;
        reports.push(residual_report(&sol)?);
        sizes.push(sol.size_norms()?);
    }

    let series: Vec<(&'static str, Vec<f64>)> = vec![
        ("r_h1", reports.iter().map(|r| r.r_h1).collect()),
        ("r_h2", reports.iter().map(|r| r.r_h2).collect()),
        ("r_31", reports.iter().map(|r| r.r_31).collect()),
        ("r_32", reports.iter().map(|r| r.r_32).collect()),
        (
            "r_h2_scaled",
            reports
                .iter()
                .map(|r| r.r_h2_scaled.unwrap_or(0.0))
                .collect(),
        ),
        ("layer_h", sizes.iter().map(|s| s.layer_h).collect()),
        ("layer_3", sizes.iter().map(|s| s.layer_3).collect()),
        ("interior", sizes.iter().map(|s| s.interior).collect()),
        ("corrector", sizes.iter().map(|s| s.corrector).collect()),
    ];
    let slopes: Vec<SlopeEntry> = series
        .iter()
        .filter_map(|(q, v)| fit_power_law(epsilons, v).map(|fit| SlopeEntry { quantity: q, fit }))
        .collect();
    let lookup = |q: &str| {
        series
            .iter()
            .find(|(name, _)| *name == q)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    };
    let slope_of = |q: &str| {
        slopes
            .iter()
            .find(|s| s.quantity == q)
            .map_or(f64::NAN, |s| s.fit.slope)
    };

    let tol = template.slope_tolerance;
    let decreasing = |name: &'static str, q: &str| {
        let v = lookup(q);
        Verdict {
            name,
            passed: strictly_decreasing(v) && slope_of(q) > 0.0,
            detail: format!("{v:?}"),
        }
    };
    let near = |name: &'static str, q: &str, expected: f64| {
        let s = slope_of(q);
        Verdict {
            name,
            passed: (s - expected).abs() <= tol,
            detail: format!("slope {s:.4}, expected {expected} ± {tol}"),
        }
    };
    let mut verdicts = vec![decreasing("r_h1_decays", "r_h1")];
    if template.nu_h.coefficient > 0.0 {
        verdicts.push(decreasing("r_h2_scaled_decays", "r_h2_scaled"));
    }
    verdicts.push(near("layer_size_exponent", "layer_h", -0.5));
    verdicts.push(near("interior_size_exponent", "interior", 0.0));

    Ok(ScalingStudy {
        epsilons: epsilons.to_vec(),
        delta_rule: template.delta,
        nu_rule: template.nu_h,
        reports,
        sizes,
        slopes,
        verdicts,
    })
}

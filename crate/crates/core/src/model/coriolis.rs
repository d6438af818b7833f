//! Coriolis factor `b(y)`, its equatorial truncation `b_δ` and the Ekman
//! decay rates built from it.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};
use crate::model::grid::Grid;
use crate::model::validation::ValidationReport;
use crate::numerics::CubicSpline;

/// Latitude dependence of the vertical rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoriolisProfile {
    /// `b = βy`, the β-plane.
    Linear { beta: f64 },
    /// `b = a y²`.
    Quadratic { scale: f64 },
    /// `b = a sin(κ y)`.
    Sine { amplitude: f64, wavenumber: f64 },
    /// Natural cubic spline through samples of `b`.
    Tabulated { samples: CubicSpline },
}

impl CoriolisProfile {
    pub fn linear(beta: f64) -> Self {
        Self::Linear { beta }
    }

    /// `[b, b', b'']` at latitude `y`.
    pub fn eval(&self, y: f64) -> [f64; 3] {
        match self {
            Self::Linear { beta } => [beta * y, *beta, 0.0],
            Self::Quadratic { scale } => [scale * y * y, 2.0 * scale * y, 2.0 * scale],
            Self::Sine {
                amplitude,
                wavenumber,
            } => {
                let (s, c) = (wavenumber * y).sin_cos();
                [
                    amplitude * s,
                    amplitude * wavenumber * c,
                    -amplitude * wavenumber * wavenumber * s,
                ]
            }
            Self::Tabulated { samples } => samples.eval(y),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval(y)[0]
    }

    /// Slope at the equator.
    pub fn beta(&self) -> f64 {
        self.eval(0.0)[1]
    }
}

/// Exponent `α` and width `δ` of the equatorial truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub delta: f64,
    pub alpha: f64,
}

/// Cutoff profile: `s^{-α}` on `(0,1)`, a cubic Hermite blend on `[1,2]`,
/// and `1` beyond. Returns the value and two derivatives.
pub fn cutoff(s: f64, alpha: f64) -> [f64; 3] {
    if s < 1.0 {
        let v = s.powf(-alpha);
        [v, -alpha * v / s, alpha * (alpha + 1.0) * v / (s * s)]
    } else if s < 2.0 {
        let t = s - 1.0;
        let u = 1.0 - t;
        [
            1.0 - alpha * t * u * u,
            -alpha * u * (1.0 - 3.0 * t),
            alpha * (4.0 - 6.0 * t),
        ]
    } else {
        [1.0, 0.0, 0.0]
    }
}

/// Coriolis factor with its equatorial zero weakened to `δ^α |y|^{1-α}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedCoriolis {
    pub base: CoriolisProfile,
    pub truncation: Option<Truncation>,
}

impl TruncatedCoriolis {
    pub fn new(base: CoriolisProfile, delta: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::parameter(
                "alpha",
                format!("must lie in (0, 1), got {alpha}"),
            ));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::parameter(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        Ok(Self {
            base,
            truncation: Some(Truncation { delta, alpha }),
        })
    }

    /// The profile itself, without truncation.
    pub fn exact(base: CoriolisProfile) -> Self {
        Self {
            base,
            truncation: None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.truncation.map(|t| t.alpha)
    }

    /// `[b_δ, b_δ', b_δ'']`.
    pub fn eval(&self, y: f64) -> [f64; 3] {
        let [b, db, d2b] = self.base.eval(y);
        let Some(Truncation { delta, alpha }) = self.truncation else {
            return [b, db, d2b];
        };
        let s = y.abs() / delta;
        if s >= 2.0 {
            return [b, db, d2b];
        }
        let [p, dp, d2p] = cutoff(s, alpha);
        let sgn = y.signum() / delta;
        [
            b * p,
            db * p + b * dp * sgn,
            d2b * p + 2.0 * db * dp * sgn + b * d2p / (delta * delta),
        ]
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval(y)[0]
    }

    /// Decay rates at latitude `y`.
    pub fn decay_rates(&self, y: f64) -> Result<DecayRates> {
        let [b, db, _] = self.eval(y);
        if y == 0.0 || b == 0.0 || !b.is_finite() {
            return Err(Error::Singular { y });
        }
        let plus = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2 * b.signum()) * b.abs().sqrt();
        Ok(DecayRates {
            plus,
            dplus_dy: plus * (db / (2.0 * b)),
        })
    }
}

/// Ekman decay rates `λ±` at one latitude; `λ⁻` is the conjugate of `λ⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub plus: Complex64,
    /// `∂_y λ⁺`.
    pub dplus_dy: Complex64,
}

impl DecayRates {
    pub fn minus(&self) -> Complex64 {
        self.plus.conj()
    }

    /// Common real part of both rates.
    pub fn real_part(&self) -> f64 {
        self.plus.re
    }
}

/// Thresholds used when checking a Coriolis profile on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoriolisTolerances {
    /// Lower bound on `|b|` for `|y| ≥ 1`, relative to `max |b|`.
    pub min_abs_relative: f64,
    /// Lower bound on `b'`, relative to `max |b'|`.
    pub min_slope_relative: f64,
    /// Allowed deviation of `b(y)/(βy)` from one at the nodes nearest the equator.
    pub equator_ratio: f64,
}

impl Default for CoriolisTolerances {
    fn default() -> Self {
        Self {
            min_abs_relative: 1e-3,
            min_slope_relative: 1e-3,
            equator_ratio: 0.05,
        }
    }
}

/// Checks nonvanishing, equatorial linearity and monotonicity of `b` on the
/// latitude nodes of `grid`.
pub fn validate_coriolis(
    profile: &CoriolisProfile,
    grid: &Grid,
    tol: &CoriolisTolerances,
) -> ValidationReport {
    let mut report = ValidationReport::new("coriolis");
    let hyp = Hypothesis::CoriolisProfile;
    let ys = grid.latitudes();
    let vals: Vec<[f64; 3]> = ys.iter().map(|&y| profile.eval(y)).collect();

    let crossing = ys.windows(2).zip(vals.windows(2)).find_map(|(y, v)| {
        let straddles_equator = y[0] < 0.0 && y[1] > 0.0;
        let sign_change = v[0][0] == 0.0 || v[0][0].signum() != v[1][0].signum();
        (!straddles_equator && sign_change).then_some(0.5 * (y[0] + y[1]))
    });
    report.push(
        hyp,
        "nonvanishing",
        crossing.is_none(),
        if crossing.is_some() {
            "b changes sign away from the equator"
        } else {
            "b has no zero off the equator"
        },
        crossing,
        None,
    );

    let max_b = vals.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
    let far = ys.iter().zip(&vals).filter(|(y, _)| y.abs() >= 1.0);
    let (y_min, b_min) = far.fold((f64::NAN, f64::INFINITY), |acc, (&y, v)| {
        if v[0].abs() < acc.1 {
            (y, v[0].abs())
        } else {
            acc
        }
    });
    let bounded = b_min >= tol.min_abs_relative * max_b && crossing.map_or(true, |y| y.abs() < 1.0);
    report.push(
        hyp,
        "bounded_below_off_equator",
        bounded,
        format!("min |b| over |y| >= 1 is {b_min:.3e}"),
        (!bounded).then_some(y_min),
        Some(b_min),
    );

    let max_slope = vals.iter().map(|v| v[1].abs()).fold(0.0, f64::max);
    let (y_slope, min_slope) =
        ys.iter()
            .zip(&vals)
            .fold((f64::NAN, f64::INFINITY), |acc, (&y, v)| {
                if v[1] < acc.1 {
                    (y, v[1])
                } else {
                    acc
                }
            });
    let slope_ok = min_slope > tol.min_slope_relative * max_slope;
    report.push(
        hyp,
        "slope_bounds",
        slope_ok,
        format!("b' ranges over [{min_slope:.3e}, {max_slope:.3e}]"),
        (!slope_ok).then_some(y_slope),
        Some(min_slope),
    );

    let beta = profile.beta();
    let nearest = grid.ny() / 2;
    let mut worst = (0.0f64, f64::NAN);
    for j in [nearest - 1, nearest] {
        let y = ys[j];
        let dev = if beta != 0.0 {
            (vals[j][0] / (beta * y) - 1.0).abs()
        } else {
            f64::INFINITY
        };
        if !(dev <= worst.0) {
            worst = (dev, y);
        }
    }
    let linear = worst.0 <= tol.equator_ratio;
    report.push(
        hyp,
        "linear_at_equator",
        linear,
        format!(
            "|b/(beta y) - 1| = {:.3e} next to the equator (beta = {beta})",
            worst.0
        ),
        (!linear).then_some(worst.1),
        Some(worst.0),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(8, 256, 8, 4.0).unwrap()
    }

    #[test]
    fn truncation_example() {
        let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), 0.5, 0.7).unwrap();
        let expected = 0.25 * 2f64.powf(0.7);
        assert!((tc.value(0.25) - expected).abs() < 1e-14);
        assert!((expected - 0.4061).abs() < 1e-4);
        assert_eq!(tc.value(1.5), 1.5);
    }

    #[test]
    fn truncation_power_law_near_equator() {
        let (delta, alpha) = (0.3, 0.6);
        let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), delta, alpha).unwrap();
        let y = 1e-9;
        let ratio = tc.value(y) / (delta.powf(alpha) * y.powf(1.0 - alpha));
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_alpha_outside_unit_interval() {
        assert!(TruncatedCoriolis::new(CoriolisProfile::linear(1.0), 0.1, 1.0).is_err());
        assert!(TruncatedCoriolis::new(CoriolisProfile::linear(1.0), 0.1, 0.0).is_err());
    }

    #[test]
    fn cutoff_blend_is_c1_and_bounded() {
        for alpha in [0.1, 0.5, 0.99] {
            let left = cutoff(1.0 - 1e-9, alpha);
            let right = cutoff(1.0, alpha);
            assert!((left[0] - right[0]).abs() < 1e-8);
            assert!((left[1] - right[1]).abs() < 1e-7);
            let end = cutoff(2.0 - 1e-12, alpha);
            assert!((end[0] - 1.0).abs() < 1e-10 && end[1].abs() < 1e-10);
            for i in 0..=1000 {
                let s = 1.0 + i as f64 / 1000.0;
                assert!(cutoff(s, alpha)[0] >= 0.5);
            }
        }
    }

    #[test]
    fn truncated_derivatives_match_differences() {
        let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), 0.2, 0.7).unwrap();
        for y in [0.05, 0.13, 0.29, 0.37, -0.31] {
            let h = 1e-6;
            let [_, d, d2] = tc.eval(y);
            let fd = (tc.value(y + h) - tc.value(y - h)) / (2.0 * h);
            let fd2 = (tc.eval(y + h)[1] - tc.eval(y - h)[1]) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6 * (1.0 + d.abs()), "{y}");
            assert!((d2 - fd2).abs() < 1e-5 * (1.0 + d2.abs()), "{y}");
        }
    }

    #[test]
    fn decay_rate_examples() {
        let tc = TruncatedCoriolis::exact(CoriolisProfile::linear(1.0));
        let r = tc.decay_rates(1.0).unwrap();
        assert!((r.plus - Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)).norm() < 1e-15);
        let r = tc.decay_rates(-1.0).unwrap();
        assert!((r.plus - Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(matches!(tc.decay_rates(0.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn linear_profile_passes() {
        let r = validate_coriolis(&CoriolisProfile::linear(1.0), &grid(), &Default::default());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn quadratic_profile_fails_slope_clause() {
        let r = validate_coriolis(
            &CoriolisProfile::Quadratic { scale: 1.0 },
            &grid(),
            &Default::default(),
        );
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.clause == "slope_bounds"));
    }

    #[test]
    fn sine_profile_fails_lower_bound() {
        let profile = CoriolisProfile::Sine {
            amplitude: 1.0,
            wavenumber: std::f64::consts::FRAC_PI_2,
        };
        let r = validate_coriolis(&profile, &grid(), &Default::default());
        let failed: Vec<_> = r.failures().map(|c| c.clause.as_str()).collect();
        assert!(failed.contains(&"bounded_below_off_equator"), "{failed:?}");
    }
}

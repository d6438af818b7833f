//! Surface wind stress `σ(x, y)` as a sum of separable terms, each a
//! latitude profile times a single zonal harmonic.

use serde::{Deserialize, Serialize};

use crate::error::Hypothesis;
use crate::model::grid::Grid;
use crate::model::validation::ValidationReport;
use crate::numerics::{fit_power_law, CubicSpline};

/// `c cos(m x) + s sin(m x)`; for `m = 0` only the cosine coefficient counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub m: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl Harmonic {
    pub fn constant(c: f64) -> Self {
        Self {
            m: 0,
            cos: c,
            sin: 0.0,
        }
    }

    pub fn sin(m: u32) -> Self {
        Self {
            m,
            cos: 0.0,
            sin: 1.0,
        }
    }

    pub fn cos(m: u32) -> Self {
        Self {
            m,
            cos: 1.0,
            sin: 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.m == 0 {
            return self.cos;
        }
        let (s, c) = (self.m as f64 * x).sin_cos();
        self.cos * c + self.sin * s
    }

    pub fn derivative(&self) -> Self {
        let m = self.m as f64;
        Self {
            m: self.m,
            cos: m * self.sin,
            sin: -m * self.cos,
        }
    }

    /// Zero-mean antiderivative; `None` for a nonzero constant.
    pub fn antiderivative(&self) -> Option<Self> {
        if self.m == 0 {
            return (self.cos == 0.0).then_some(Self::constant(0.0));
        }
        let m = self.m as f64;
        Some(Self {
            m: self.m,
            cos: -self.sin / m,
            sin: self.cos / m,
        })
    }

    /// Average over one period.
    pub fn mean(&self) -> f64 {
        if self.m == 0 {
            self.cos
        } else {
            0.0
        }
    }
}

/// Latitude dependence of one stress term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatitudeProfile {
    /// `y^power · exp(-gaussian · y²)`.
    Power {
        power: u32,
        #[serde(default)]
        gaussian: f64,
    },
    /// Smooth bump supported on `inner < |y| < outer`, maximal value one.
    Bump { inner: f64, outer: f64 },
    /// Natural cubic spline through samples.
    Tabulated { samples: CubicSpline },
}

impl LatitudeProfile {
    /// `[Y, Y', Y'']`.
    pub fn eval(&self, y: f64) -> [f64; 3] {
        match self {
            Self::Power { power, gaussian } => {
                let k = *power as i32;
                let a = *gaussian;
                let e = (-a * y * y).exp();
                let mono = |c: f64, n: i32| if c == 0.0 { 0.0 } else { c * y.powi(n) };
                let v = mono(1.0, k);
                let d = mono(k as f64, k - 1) - mono(2.0 * a, k + 1);
                let d2 = mono((k * (k - 1)) as f64, k - 2) - mono(2.0 * a * (2 * k + 1) as f64, k)
                    + mono(4.0 * a * a, k + 2);
                [v * e, d * e, d2 * e]
            }
            Self::Bump { inner, outer } => {
                let centre = 0.5 * (inner + outer);
                let half = 0.5 * (outer - inner);
                let r = (y.abs() - centre) / half;
                if r.abs() >= 1.0 {
                    return [0.0; 3];
                }
                let q = 1.0 - r * r;
                let g = (1.0 - 1.0 / q).exp();
                let p1 = -2.0 * r / (q * q);
                let p2 = -(2.0 * q + 8.0 * r * r) / (q * q * q);
                [
                    g,
                    g * p1 * y.signum() / half,
                    g * (p2 + p1 * p1) / (half * half),
                ]
            }
            Self::Tabulated { samples } => samples.eval(y),
        }
    }

    /// Order of the zero at the equator, when known.
    pub fn vanishing_order(&self) -> Option<u32> {
        match self {
            Self::Power { power, .. } => Some(*power),
            Self::Bump { inner, .. } if *inner > 0.0 => Some(u32::MAX),
            _ => None,
        }
    }
}

/// `amplitude · Y(y) · X(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressTerm {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub latitude: LatitudeProfile,
    pub zonal: Harmonic,
}

fn one() -> f64 {
    1.0
}

/// Value and derivatives up to second order of both stress components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StressJet {
    pub value: [f64; 2],
    pub dx: [f64; 2],
    pub dy: [f64; 2],
    pub dxx: [f64; 2],
    pub dxy: [f64; 2],
    pub dyy: [f64; 2],
}

impl StressJet {
    /// `∂ₓσ₁ + ∂_yσ₂`.
    pub fn div(&self) -> f64 {
        self.dx[0] + self.dy[1]
    }

    /// `∂ₓσ₂ − ∂_yσ₁`.
    pub fn rot(&self) -> f64 {
        self.dx[1] - self.dy[0]
    }
}

/// Wind stress; each component is a sum of separable terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindStress {
    #[serde(default)]
    pub zonal: Vec<StressTerm>,
    #[serde(default)]
    pub meridional: Vec<StressTerm>,
}

impl WindStress {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `σ = (0, A y^k e^{-a y²} sin(m x))`.
    pub fn meridional_power(amplitude: f64, power: u32, gaussian: f64, m: u32) -> Self {
        Self {
            zonal: Vec::new(),
            meridional: vec![StressTerm {
                amplitude,
                latitude: LatitudeProfile::Power { power, gaussian },
                zonal: Harmonic::sin(m),
            }],
        }
    }

    /// `σ = (A y^k e^{-a y²} X(x), 0)`.
    pub fn zonal_power(amplitude: f64, power: u32, gaussian: f64, zonal: Harmonic) -> Self {
        Self {
            zonal: vec![StressTerm {
                amplitude,
                latitude: LatitudeProfile::Power { power, gaussian },
                zonal,
            }],
            meridional: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms().all(|(_, t)| t.amplitude == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for t in out.zonal.iter_mut().chain(out.meridional.iter_mut()) {
            t.amplitude *= c;
        }
        out
    }

    /// Sum of two stresses.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.zonal.extend(other.zonal.iter().cloned());
        out.meridional.extend(other.meridional.iter().cloned());
        out
    }

    /// Terms tagged with their component index.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &StressTerm)> {
        self.zonal
            .iter()
            .map(|t| (0, t))
            .chain(self.meridional.iter().map(|t| (1, t)))
    }

    /// Smallest known equatorial vanishing order over all terms.
    pub fn vanishing_order(&self) -> Option<u32> {
        self.terms()
            .filter(|(_, t)| t.amplitude != 0.0)
            .map(|(_, t)| t.latitude.vanishing_order())
            .try_fold(u32::MAX, |acc, o| o.map(|o| acc.min(o)))
    }

    pub fn eval(&self, x: f64, y: f64) -> StressJet {
        let mut j = StressJet::default();
        for (c, t) in self.terms() {
            let [yv, yd, ydd] = t.latitude.eval(y);
            let h = t.zonal;
            let hd = h.derivative();
            let (xv, xd, xdd) = (h.eval(x), hd.eval(x), hd.derivative().eval(x));
            let a = t.amplitude;
            j.value[c] += a * yv * xv;
            j.dx[c] += a * yv * xd;
            j.dy[c] += a * yd * xv;
            j.dxx[c] += a * yv * xdd;
            j.dxy[c] += a * yd * xd;
            j.dyy[c] += a * ydd * xv;
        }
        j
    }

    pub fn value(&self, x: f64, y: f64) -> [f64; 2] {
        self.eval(x, y).value
    }

    /// Zonal mean of `σ₁` at latitude `y`, exact for the harmonic representation.
    pub fn zonal_mean_of_zonal(&self, y: f64) -> f64 {
        self.zonal
            .iter()
            .map(|t| t.amplitude * t.latitude.eval(y)[0] * t.zonal.mean())
            .sum()
    }
}

/// Thresholds for [`validate_windstress`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StressTolerances {
    /// Allowed zonal mean of `σ₁`, relative to `max |σ|`.
    pub compatibility: f64,
    /// Allowed shortfall of the fitted local exponents.
    pub exponent_slack: f64,
}

impl Default for StressTolerances {
    fn default() -> Self {
        Self {
            compatibility: 1e-12,
            exponent_slack: 0.1,
        }
    }
}

/// Checks the zonal compatibility condition and the quadratic vanishing of
/// `σ`, `∂ₓσ` and linear vanishing of `∂_yσ` at the equator.
pub fn validate_windstress(
    sigma: &WindStress,
    grid: &Grid,
    tol: &StressTolerances,
) -> ValidationReport {
    let mut report = ValidationReport::new("wind_stress");
    let xs = grid.longitudes();
    let ys = grid.latitudes();

    let scale = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .map(|(x, y)| {
            let v = sigma.value(x, y);
            v[0].hypot(v[1])
        })
        .fold(0.0, f64::max);
    let mut worst = (0.0f64, f64::NAN);
    for &y in &ys {
        let mean = xs.iter().map(|&x| sigma.value(x, y)[0]).sum::<f64>() / xs.len() as f64;
        if mean.abs() > worst.0 {
            worst = (mean.abs(), y);
        }
    }
    let compatible = worst.0 <= tol.compatibility * scale.max(f64::MIN_POSITIVE);
    report.push(
        Hypothesis::StressCompatibility,
        "zonal_mean_of_zonal_stress",
        compatible,
        format!("max |zonal mean of sigma_1| = {:.3e}", worst.0),
        (!compatible).then_some(worst.1),
        Some(worst.0),
    );

    let probes: Vec<f64> = (0..=8).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    let sup = |f: &dyn Fn(f64, f64) -> f64, y: f64| xs.iter().map(|&x| f(x, y)).fold(0.0, f64::max);
    let quantities: [(&str, u32, Box<dyn Fn(f64, f64) -> f64>); 3] = [
        (
            "stress_vanishes_quadratically",
            2,
            Box::new(|x, y| {
                let v = sigma.value(x, y);
                v[0].hypot(v[1])
            }),
        ),
        (
            "zonal_derivative_vanishes_quadratically",
            2,
            Box::new(|x, y| {
                let d = sigma.eval(x, y).dx;
                d[0].hypot(d[1])
            }),
        ),
        (
            "meridional_derivative_vanishes_linearly",
            1,
            Box::new(|x, y| {
                let d = sigma.eval(x, y).dy;
                d[0].hypot(d[1])
            }),
        ),
    ];
    for (clause, order, f) in quantities {
        let mut exponent = f64::INFINITY;
        let mut constant = 0.0f64;
        for side in [-1.0, 1.0] {
            let vals: Vec<f64> = probes.iter().map(|&p| sup(&*f, side * p)).collect();
            let nonzero = vals.iter().any(|v| *v > 0.0);
            if nonzero {
                let e = fit_power_law(&probes, &vals).map_or(0.0, |fit| fit.slope);
                exponent = exponent.min(e);
            }
            for (&p, v) in probes.iter().zip(&vals) {
                constant = constant.max(v / p.powi(order as i32));
            }
        }
        let passed = exponent >= order as f64 - tol.exponent_slack;
        let shown = if exponent.is_finite() {
            format!("{exponent:.3}")
        } else {
            "inf".to_owned()
        };
        report.push(
            Hypothesis::StressVanishingOrder,
            clause,
            passed,
            format!("local exponent {shown} (needs {order}), fitted constant {constant:.3e}"),
            (!passed).then_some(probes[0]),
            Some(if exponent.is_finite() {
                exponent
            } else {
                f64::MAX
            }),
        );
    }
    report
}

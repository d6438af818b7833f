use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::tridiagonal::solve_tridiagonal;

/// Natural cubic spline through tabulated samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineSamples", into = "SplineSamples")]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineSamples {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<SplineSamples> for CubicSpline {
    type Error = Error;

    fn try_from(s: SplineSamples) -> Result<Self> {
        CubicSpline::new(s.knots, s.values)
    }
}

impl From<CubicSpline> for SplineSamples {
    fn from(s: CubicSpline) -> Self {
        SplineSamples {
            knots: s.knots,
            values: s.values,
        }
    }
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::parameter("spline", "knot and value counts differ"));
        }
        if knots.len() < 3 {
            return Err(Error::parameter(
                "spline",
                "at least three samples are required",
            ));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::parameter(
                "spline",
                "knots must be strictly increasing",
            ));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::parameter("spline", "samples must be finite"));
        }
        let n = knots.len();
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = knots[i] - knots[i - 1];
            let h1 = knots[i + 1] - knots[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0;
        }
        let second = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Ok(Self {
            knots,
            values,
            second,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Value and first two derivatives; linear extrapolation outside the knots.
    pub fn eval(&self, x: f64) -> [f64; 3] {
        let n = self.knots.len();
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            let edge = if x < lo { lo } else { hi };
            let [v, d, _] = self.eval(edge);
            return [v + d * (x - edge), d, 0.0];
        }
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let slope = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let curvature = a * m0 + b * m1;
        [value, slope, curvature]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_interior() {
        let knots: Vec<f64> = (0..=200).map(|i| -2.0 + 0.02 * i as f64).collect();
        let values: Vec<f64> = knots.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(knots, values).unwrap();
        let [v, d, c] = s.eval(0.3);
        assert!((v - 0.3f64.sin()).abs() < 1e-7);
        assert!((d - 0.3f64.cos()).abs() < 1e-5);
        assert!((c + 0.3f64.sin()).abs() < 1e-3);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(CubicSpline::new(vec![0.0, 2.0, 1.0], vec![0.0; 3]).is_err());
    }
}

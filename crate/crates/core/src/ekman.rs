//! Closed-form surface Ekman layer.
//!
//! In the stretched variable `ζ = (1 − z)/ε` the horizontal layer velocity is
//! `U_h = (1/ε) Re[(σ + iσ⊥) e^{−λζ}/λ]` with `λ = λ⁺(y)` the decay rate built
//! from the truncated Coriolis factor. The vertical velocity follows from the
//! divergence constraint `∂_ζU_3 = ε div_h U_h` with decay at infinity, and
//! the pressure is `P = −ε³ div_h U_h`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Field, Grid, TruncatedCoriolis, WindStress};
use crate::numerics::Rule;

/// Smallest truncation exponent for which horizontal gradients of `U_3` are
/// square integrable.
pub const GRADIENT_ALPHA_THRESHOLD: f64 = 0.6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Surface layer generated by a wind stress.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLayerProfile {
    stress: WindStress,
    coriolis: TruncatedCoriolis,
    epsilon: f64,
}

/// Everything about the layer at one horizontal position that does not depend on `ζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Column {
    /// `σ + iσ⊥`.
    a: [Complex64; 2],
    /// `div_h(σ + iσ⊥) = div σ − i rot σ`.
    div_a: Complex64,
    lambda: Complex64,
    dlambda: Complex64,
    epsilon: f64,
    stress: [f64; 2],
}

impl Column {
    fn decay(&self, zeta: f64) -> Complex64 {
        (-self.lambda * zeta).exp()
    }

    pub fn decay_rate(&self) -> Complex64 {
        self.lambda
    }

    /// `σ + iσ⊥` by component.
    pub fn amplitude(&self) -> [Complex64; 2] {
        self.a
    }

    pub fn velocity_h(&self, zeta: f64) -> [f64; 2] {
        let q = self.decay(zeta) / self.lambda / self.epsilon;
        [(self.a[0] * q).re, (self.a[1] * q).re]
    }

    /// `∂_ζ U_h`.
    pub fn dzeta_velocity_h(&self, zeta: f64) -> [f64; 2] {
        let q = -self.decay(zeta) / self.epsilon;
        [(self.a[0] * q).re, (self.a[1] * q).re]
    }

    /// `∂_ζζ U_h`.
    pub fn dzeta2_velocity_h(&self, zeta: f64) -> [f64; 2] {
        let q = self.lambda * self.decay(zeta) / self.epsilon;
        [(self.a[0] * q).re, (self.a[1] * q).re]
    }

    pub fn velocity_3(&self, zeta: f64) -> f64 {
        let l = self.lambda;
        let inner =
            self.div_a / (l * l) - self.a[1] * self.dlambda * (2.0 + zeta * l) / (l * l * l);
        -(self.decay(zeta) * inner).re
    }

    /// `∂_ζζ U_3`.
    pub fn dzeta2_velocity_3(&self, zeta: f64) -> f64 {
        let l = self.lambda;
        let q = self.div_a / (l * l) - self.a[1] * self.dlambda * (2.0 + zeta * l) / (l * l * l);
        let dq = -self.a[1] * self.dlambda / (l * l);
        -(self.decay(zeta) * (l * l * q - 2.0 * l * dq)).re
    }

    /// `div_h U_h`.
    pub fn div_h(&self, zeta: f64) -> f64 {
        let l = self.lambda;
        let inner = self.div_a / l - self.a[1] * self.dlambda * (zeta * l + 1.0) / (l * l);
        (self.decay(zeta) * inner).re / self.epsilon
    }

    /// `∂_ζ div_h U_h`.
    pub fn dzeta_div_h(&self, zeta: f64) -> f64 {
        let inner = -self.div_a + self.a[1] * self.dlambda * zeta;
        (self.decay(zeta) * inner).re / self.epsilon
    }

    pub fn pressure(&self, zeta: f64) -> f64 {
        -self.epsilon.powi(3) * self.div_h(zeta)
    }

    /// `∫₀^∞ |U_h|² dζ`, using `|U_h|² = |σ|² e^{−2Re λ ζ}/(ε²|λ|²)`.
    pub fn horizontal_energy(&self) -> f64 {
        self.horizontal_energy_to(f64::INFINITY)
    }

    /// `∫₀^Z |U_h|² dζ`.
    pub fn horizontal_energy_to(&self, depth: f64) -> f64 {
        let re = self.lambda.re;
        let s2 = self.stress[0].powi(2) + self.stress[1].powi(2);
        let tail = if depth.is_finite() {
            (-2.0 * re * depth).exp()
        } else {
            0.0
        };
        s2 / (self.epsilon.powi(2) * self.lambda.norm_sqr()) * (1.0 - tail) / (2.0 * re)
    }

    /// Gauss–Legendre rule in `ζ` adapted to the decay length of this column.
    pub fn zeta_rule(&self) -> Rule {
        let re = self.lambda.re;
        Rule::geometric(0.25 / re, 40.0 / re, 8)
    }
}

/// Squared `L²(0, ∞)` norms of one layer column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnNorms {
    /// `∫|U_h|² dζ` from the closed form.
    pub horizontal: f64,
    /// `∫|U_h|² dζ` by quadrature.
    pub horizontal_quadrature: f64,
    /// `∫|U_3|² dζ` by quadrature.
    pub vertical: f64,
}

/// `L²(ω_h × (0, ∞))` norms of the layer and its horizontal gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerNorms {
    pub horizontal: f64,
    pub vertical: f64,
    /// `‖(b − b_δ) U_h‖`.
    pub truncation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_horizontal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_vertical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pressure_gradient: Option<f64>,
}

impl BoundaryLayerProfile {
    pub fn new(stress: WindStress, coriolis: TruncatedCoriolis, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::parameter(
                "epsilon",
                format!("must be positive, got {epsilon}"),
            ));
        }
        Ok(Self {
            stress,
            coriolis,
            epsilon,
        })
    }

    pub fn stress(&self) -> &WindStress {
        &self.stress
    }

    pub fn coriolis(&self) -> &TruncatedCoriolis {
        &self.coriolis
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn column(&self, x: f64, y: f64) -> Result<Column> {
        let rates = self.coriolis.decay_rates(y)?;
        let jet = self.stress.eval(x, y);
        let [s1, s2] = jet.value;
        let a = [Complex64::new(s1, -s2), Complex64::new(s2, s1)];
        Ok(Column {
            a,
            div_a: jet.div() - I * jet.rot(),
            lambda: rates.plus,
            dlambda: rates.dplus_dy,
            epsilon: self.epsilon,
            stress: jet.value,
        })
    }

    pub fn velocity_h(&self, x: f64, y: f64, zeta: f64) -> Result<[f64; 2]> {
        Ok(self.column(x, y)?.velocity_h(zeta))
    }

    pub fn velocity_3(&self, x: f64, y: f64, zeta: f64) -> Result<f64> {
        Ok(self.column(x, y)?.velocity_3(zeta))
    }

    pub fn pressure(&self, x: f64, y: f64, zeta: f64) -> Result<f64> {
        Ok(self.column(x, y)?.pressure(zeta))
    }

    pub fn div_h(&self, x: f64, y: f64, zeta: f64) -> Result<f64> {
        Ok(self.column(x, y)?.div_h(zeta))
    }

    pub fn pumping(&self, x: f64, y: f64) -> Result<f64> {
        ekman_pumping(&self.stress, &self.coriolis, x, y)
    }

    pub fn column_l2_norms(&self, x: f64, y: f64) -> Result<ColumnNorms> {
        let col = self.column(x, y)?;
        let rule = col.zeta_rule();
        let horizontal_quadrature = rule.integrate(|s| {
            let [u, v] = col.velocity_h(s);
            u * u + v * v
        });
        let vertical = rule.integrate(|s| col.velocity_3(s).powi(2));
        Ok(ColumnNorms {
            horizontal: col.horizontal_energy(),
            horizontal_quadrature,
            vertical,
        })
    }

    /// Layer velocity `u(x, y, z) = U(x, y, (1 − z)/ε)` on the grid, three components.
    pub fn sample_bl_field(&self, grid: &Grid) -> Result<Field> {
        let (nx, ny) = (grid.nx(), grid.ny());
        let zetas: Vec<f64> = grid
            .heights()
            .iter()
            .map(|z| (1.0 - z) / self.epsilon)
            .collect();
        let columns: Vec<Vec<[f64; 3]>> = (0..nx * ny)
            .into_par_iter()
            .map(|c| {
                let col = self.column(grid.x(c / ny), grid.y(c % ny))?;
                Ok(zetas
                    .iter()
                    .map(|&s| {
                        let [u, v] = col.velocity_h(s);
                        [u, v, col.velocity_3(s)]
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut field = Field::zeros_volume(*grid, 3);
        for (c, values) in columns.iter().enumerate() {
            for (k, v) in values.iter().enumerate() {
                for (comp, &value) in v.iter().enumerate() {
                    field.set(comp, c / ny, c % ny, k, value);
                }
            }
        }
        Ok(field)
    }

    /// Norms over `ω_h × (0, ∞)` with the grid's midpoint rule in the horizontal.
    ///
    /// Gradient norms are included when `with_gradients` is set; they require
    /// a truncation exponent above [`GRADIENT_ALPHA_THRESHOLD`].
    pub fn layer_norms(&self, grid: &Grid, with_gradients: bool) -> Result<LayerNorms> {
        if with_gradients {
            self.require_gradient_regularity()?;
        }
        let ny = grid.ny();
        let parts: Vec<[f64; 6]> = (0..grid.nx() * ny)
            .into_par_iter()
            .map(|c| self.column_contributions(grid.x(c / ny), grid.y(c % ny), with_gradients))
            .collect::<Result<_>>()?;
        let mut sums = [0.0; 6];
        for p in &parts {
            for (s, v) in sums.iter_mut().zip(p) {
                *s += v;
            }
        }
        let area = grid.cell_area();
        let norm = |s: f64| (s * area).sqrt();
        Ok(LayerNorms {
            horizontal: norm(sums[0]),
            vertical: norm(sums[1]),
            truncation: norm(sums[2]),
            gradient_horizontal: with_gradients.then(|| norm(sums[3])),
            gradient_vertical: with_gradients.then(|| norm(sums[4])),
            pressure_gradient: with_gradients.then(|| norm(sums[5])),
        })
    }

    /// Refuses gradient computations where `∇_h U_3` is not square integrable.
    pub fn require_gradient_regularity(&self) -> Result<()> {
        match self.coriolis.alpha() {
            Some(a) if a > GRADIENT_ALPHA_THRESHOLD => Ok(()),
            Some(a) => Err(Error::hypothesis(
                crate::error::Hypothesis::TruncationExponent,
                format!("gradient norms need alpha > 3/5, got {a}"),
            )),
            None => Err(Error::hypothesis(
                crate::error::Hypothesis::TruncationExponent,
                "gradient norms need a truncated Coriolis factor",
            )),
        }
    }

    /// Horizontal finite-difference step used for gradients at latitude `y`.
    pub fn gradient_step(y: f64) -> f64 {
        (1e-4f64).min(0.25 * y.abs())
    }

    fn column_contributions(&self, x: f64, y: f64, with_gradients: bool) -> Result<[f64; 6]> {
        let col = self.column(x, y)?;
        let rule = col.zeta_rule();
        let horizontal = col.horizontal_energy();
        let vertical = rule.integrate(|s| col.velocity_3(s).powi(2));
        let gap = self.coriolis.base.value(y) - self.coriolis.value(y);
        let truncation = gap * gap * horizontal;
        if !with_gradients {
            return Ok([horizontal, vertical, truncation, 0.0, 0.0, 0.0]);
        }
        let h = Self::gradient_step(y);
        let shifted = [
            self.column(x + h, y)?,
            self.column(x - h, y)?,
            self.column(x, y + h)?,
            self.column(x, y - h)?,
        ];
        let d = |f: &dyn Fn(&Column) -> f64| {
            [
                (f(&shifted[0]) - f(&shifted[1])) / (2.0 * h),
                (f(&shifted[2]) - f(&shifted[3])) / (2.0 * h),
            ]
        };
        let mut grads = [0.0; 3];
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let du1 = d(&|c| c.velocity_h(s)[0]);
            let du2 = d(&|c| c.velocity_h(s)[1]);
            let du3 = d(&|c| c.velocity_3(s));
            let dp = d(&|c| c.pressure(s));
            grads[0] += w * (du1[0].powi(2) + du1[1].powi(2) + du2[0].powi(2) + du2[1].powi(2));
            grads[1] += w * (du3[0].powi(2) + du3[1].powi(2));
            grads[2] += w * (dp[0].powi(2) + dp[1].powi(2));
        }
        Ok([
            horizontal, vertical, truncation, grads[0], grads[1], grads[2],
        ])
    }
}

/// Ekman pumping `w_δ = ∂ₓσ₂/b_δ − ∂_y(σ₁/b_δ)`.
pub fn ekman_pumping(
    stress: &WindStress,
    coriolis: &TruncatedCoriolis,
    x: f64,
    y: f64,
) -> Result<f64> {
    Ok(pumping_jet(stress, coriolis, x, y)?[0])
}

/// `[w_δ, ∂_y w_δ]`.
pub fn pumping_jet(
    stress: &WindStress,
    coriolis: &TruncatedCoriolis,
    x: f64,
    y: f64,
) -> Result<[f64; 2]> {
    if y == 0.0 {
        return Err(Error::Singular { y });
    }
    let [b, db, d2b] = coriolis.eval(y);
    let j = stress.eval(x, y);
    let rot = j.rot();
    let drot = j.dxy[1] - j.dyy[0];
    let s1 = j.value[0];
    let w = rot / b + s1 * db / (b * b);
    let dw = drot / b - rot * db / (b * b)
        + j.dy[0] * db / (b * b)
        + s1 * (d2b / (b * b) - 2.0 * db * db / (b * b * b));
    Ok([w, dw])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoriolisProfile;

    fn unit_column(stress: WindStress) -> BoundaryLayerProfile {
        let tc = TruncatedCoriolis::exact(CoriolisProfile::linear(1.0));
        BoundaryLayerProfile::new(stress, tc, 1.0).unwrap()
    }

    #[test]
    fn classic_deflection() {
        let s = WindStress::zonal_power(1.0, 0, 0.0, crate::model::Harmonic::constant(1.0));
        let p = unit_column(s);
        let [u, v] = p.velocity_h(0.3, 1.0, 0.0).unwrap();
        assert!((u - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((v + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn unit_column_energy() {
        let s = WindStress::zonal_power(1.0, 0, 0.0, crate::model::Harmonic::constant(1.0));
        let n = unit_column(s).column_l2_norms(0.0, 1.0).unwrap();
        assert!((n.horizontal - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((n.horizontal_quadrature - n.horizontal).abs() < 1e-12);
    }

    #[test]
    fn zero_stress_is_zero() {
        let p = unit_column(WindStress::zero());
        assert_eq!(p.velocity_h(1.0, 0.5, 0.2).unwrap(), [0.0, 0.0]);
        assert_eq!(p.velocity_3(1.0, 0.5, 0.2).unwrap(), 0.0);
        assert_eq!(p.pressure(1.0, 0.5, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn equator_is_singular() {
        let p = unit_column(WindStress::meridional_power(1.0, 2, 0.0, 1));
        assert!(matches!(
            p.velocity_h(0.0, 0.0, 1.0),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            ekman_pumping(p.stress(), p.coriolis(), 0.0, 0.0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn pumping_example() {
        let s = WindStress::meridional_power(1.0, 2, 0.0, 1);
        let tc = TruncatedCoriolis::exact(CoriolisProfile::linear(1.0));
        assert!((ekman_pumping(&s, &tc, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let [_, dw] = pumping_jet(&s, &tc, 0.4, 0.7).unwrap();
        assert!((dw - 0.4f64.cos()).abs() < 1e-13);
    }

    #[test]
    fn gradients_refused_below_threshold() {
        let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), 0.1, 0.5).unwrap();
        let p = BoundaryLayerProfile::new(WindStress::meridional_power(1.0, 2, 0.0, 1), tc, 0.1)
            .unwrap();
        let grid = Grid::new(4, 8, 4, 4.0).unwrap();
        let err = p.layer_norms(&grid, true).unwrap_err();
        assert_eq!(
            err.violated_hypothesis(),
            Some(crate::error::Hypothesis::TruncationExponent)
        );
        assert!(p.layer_norms(&grid, false).is_ok());
    }
}

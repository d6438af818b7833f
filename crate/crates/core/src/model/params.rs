use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensional scales in SI units. Viscosities and diffusivity are kinematic
/// (already divided by the reference density).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalScales {
    /// Horizontal velocity scale `U` (m/s).
    pub velocity: f64,
    /// Horizontal length scale `H` (m).
    pub horizontal_length: f64,
    /// Ocean depth `D` (m).
    pub depth: f64,
    /// Time scale `T` (s).
    pub time: f64,
    /// Rotation rate `Ω₀` (1/s).
    pub rotation_rate: f64,
    /// Vertical turbulent viscosity `A_z` (m²/s).
    pub vertical_viscosity: f64,
    /// Horizontal turbulent viscosity `A_h` (m²/s).
    pub horizontal_viscosity: f64,
    /// Wind stress magnitude, in the units that make `σD/(A_z U)` dimensionless.
    pub stress_magnitude: f64,
    /// Heat diffusivity `κ` (m²/s).
    pub heat_diffusivity: f64,
}

impl PhysicalScales {
    /// Vertical velocity scale `W = U D / H` keeping the rescaled flow
    /// divergence free.
    pub fn vertical_velocity(&self) -> f64 {
        self.velocity * self.depth / self.horizontal_length
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("velocity", self.velocity),
            ("horizontal_length", self.horizontal_length),
            ("depth", self.depth),
            ("time", self.time),
            ("rotation_rate", self.rotation_rate),
            ("vertical_viscosity", self.vertical_viscosity),
            ("horizontal_viscosity", self.horizontal_viscosity),
            ("stress_magnitude", self.stress_magnitude),
            ("heat_diffusivity", self.heat_diffusivity),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::parameter(
                    name,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

/// Dimensionless numbers of the rescaled problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    /// Rossby number `ε`.
    pub epsilon: f64,
    /// Aspect ratio `η = D/H`.
    pub eta: f64,
    pub nu_z: f64,
    pub nu_h: f64,
    /// Surface stress amplitude `γ`.
    pub gamma: f64,
    /// Heat diffusion coefficient `λ`.
    pub lambda_heat: f64,
    /// Slope of the Coriolis factor at the equator.
    pub beta: f64,
    /// Truncation width `δ`.
    pub delta: f64,
    /// Truncation exponent `α`.
    pub alpha: f64,
}

impl Parameters {
    /// Parameters in the distinguished limit `η = ν_z = ε`, `γ = ε⁻²`.
    pub fn distinguished(epsilon: f64, nu_h: f64, delta: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            eta: epsilon,
            nu_z: epsilon,
            nu_h,
            gamma: epsilon.powi(-2),
            lambda_heat: 1.0,
            beta: 1.0,
            delta,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lambda_heat(mut self, lambda: f64) -> Self {
        self.lambda_heat = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("eta", self.eta),
            ("nu_z", self.nu_z),
            ("gamma", self.gamma),
            ("lambda_heat", self.lambda_heat),
            ("beta", self.beta),
            ("delta", self.delta),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::parameter(
                    name,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !(self.nu_h.is_finite() && self.nu_h >= 0.0) {
            return Err(Error::parameter(
                "nu_h",
                format!("must be non-negative, got {}", self.nu_h),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::parameter(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        Ok(())
    }
}

/// Dimensionless numbers implied by a set of physical scales.
///
/// `β`, `δ` and `α` are not fixed by the scales; they default to `1`, `ε`
/// and `0.7`.
pub fn nondimensionalize(scales: &PhysicalScales) -> Result<Parameters> {
    scales.validate()?;
    let s = scales;
    let epsilon = 1.0 / (s.time * s.rotation_rate);
    Ok(Parameters {
        epsilon,
        eta: s.depth / s.horizontal_length,
        nu_z: s.time * s.vertical_viscosity / (s.depth * s.depth),
        nu_h: s.horizontal_viscosity * s.time / (s.horizontal_length * s.horizontal_length),
        gamma: s.stress_magnitude * s.depth / (s.vertical_viscosity * s.velocity),
        lambda_heat: s.heat_diffusivity * s.horizontal_length / (s.depth * s.depth * s.velocity),
        beta: 1.0,
        delta: epsilon,
        alpha: 0.7,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ocean() -> PhysicalScales {
        PhysicalScales {
            velocity: 1e-2,
            horizontal_length: 1e7,
            depth: 4e3,
            time: 1e7,
            rotation_rate: 7e-5,
            vertical_viscosity: 1e-3,
            horizontal_viscosity: 1e4,
            stress_magnitude: 1e-4,
            heat_diffusivity: 1e-4,
        }
    }

    #[test]
    fn ocean_orders_of_magnitude() {
        let p = nondimensionalize(&ocean()).unwrap();
        assert!((p.epsilon - 1.0 / 700.0).abs() < 1e-15);
        assert!((p.eta - 4e-4).abs() < 1e-18);
        assert!((p.nu_z - 6.25e-4).abs() < 1e-16);
        assert!((ocean().vertical_velocity() - 4e-6).abs() < 1e-20);
    }

    #[test]
    fn rejects_non_positive_scale() {
        let mut s = ocean();
        s.depth = 0.0;
        match nondimensionalize(&s) {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "depth"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn time_rescaling_is_homogeneous() {
        let base = nondimensionalize(&ocean()).unwrap();
        let mut s = ocean();
        s.time *= 3.0;
        let p = nondimensionalize(&s).unwrap();
        assert!((p.epsilon * 3.0 - base.epsilon).abs() < 1e-18);
        assert!((p.nu_z - 3.0 * base.nu_z).abs() < 1e-15);
        assert!((p.nu_h - 3.0 * base.nu_h).abs() < 1e-15);
    }
}

//! Exact spectral propagation of depth-independent perturbations: zonal-mean
//! heat flow and Rossby waves.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};
use crate::model::{Field, Grid};
use crate::numerics::fft::{is_nyquist, signed_index, Transform2};

/// Default bound on `max |k_h · v̂| / max |k_h| |v̂|` for accepted data.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RossbyParameters {
    pub epsilon: f64,
    pub beta: f64,
    pub nu_h: f64,
}

impl RossbyParameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::parameter(
                "epsilon",
                format!("must be positive, got {}", self.epsilon),
            ));
        }
        if !self.beta.is_finite() {
            return Err(Error::parameter("beta", "must be finite"));
        }
        if !(self.nu_h >= 0.0 && self.nu_h.is_finite()) {
            return Err(Error::parameter(
                "nu_h",
                format!("must be non-negative, got {}", self.nu_h),
            ));
        }
        Ok(())
    }
}

/// `ω = βk / (ε(k² + ξ²))`; zero for zonal modes.
pub fn rossby_frequency(k: f64, xi_y: f64, beta: f64, epsilon: f64) -> Result<f64> {
    let norm2 = k * k + xi_y * xi_y;
    if norm2 == 0.0 {
        return Err(Error::parameter(
            "wavevector",
            "the frequency is undefined at k_h = 0",
        ));
    }
    Ok(beta * k / (epsilon * norm2))
}

/// Fourier coefficients of a horizontal velocity on the periodic box
/// `[0, 2π) × [−L, L)`, with unnormalized forward transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    grid: Grid,
    params: RossbyParameters,
    time: f64,
    coefficients: [Vec<Complex64>; 2],
}

fn wavevector(grid: &Grid, i: usize, j: usize) -> (f64, f64) {
    (
        signed_index(i, grid.nx()) as f64,
        std::f64::consts::PI / grid.half_width() * signed_index(j, grid.ny()) as f64,
    )
}

fn forward(t: &Transform2, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    t.forward(&mut data);
    data
}

fn inverse(t: &Transform2, coefficients: &[Complex64]) -> Vec<f64> {
    let mut data = coefficients.to_vec();
    t.inverse(&mut data);
    data.iter().map(|c| c.re).collect()
}

fn divergence_defect(grid: &Grid, coefficients: &[Vec<Complex64>; 2]) -> f64 {
    let ny = grid.ny();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (n, (a, b)) in coefficients[0].iter().zip(&coefficients[1]).enumerate() {
        let (i, j) = (n / ny, n % ny);
        if is_nyquist(i, grid.nx()) || is_nyquist(j, ny) {
            continue;
        }
        let (k, xi) = wavevector(grid, i, j);
        worst = worst.max((k * a + xi * b).norm());
        scale = scale.max((k * k + xi * xi).sqrt() * (a.norm_sqr() + b.norm_sqr()).sqrt());
    }
    if scale > 0.0 {
        worst / scale
    } else {
        0.0
    }
}

impl SpectralState {
    /// Transforms a divergence-free horizontal velocity (two components, one level).
    pub fn from_velocity(
        velocity: &Field,
        params: RossbyParameters,
        tolerance: f64,
    ) -> Result<Self> {
        params.validate()?;
        if velocity.components() != 2 || velocity.levels() != 1 {
            return Err(Error::parameter(
                "velocity",
                "expected two components on one level",
            ));
        }
        let grid = *velocity.grid();
        let t = Transform2::new(grid.nx(), grid.ny());
        let coefficients = [
            forward(&t, velocity.component(0)),
            forward(&t, velocity.component(1)),
        ];
        let defect = divergence_defect(&grid, &coefficients);
        if defect > tolerance {
            return Err(Error::hypothesis(
                Hypothesis::DivergenceFree,
                format!("relative spectral divergence {defect:.3e} exceeds {tolerance:.1e}"),
            ));
        }
        Ok(Self {
            grid,
            params,
            time: 0.0,
            coefficients,
        })
    }

    /// `v = ∇⊥ψ = (−∂_y ψ, ∂_x ψ)` computed spectrally; divergence free by construction.
    pub fn from_streamfunction(psi: &Field, params: RossbyParameters) -> Result<Self> {
        params.validate()?;
        let grid = *psi.grid();
        let t = Transform2::new(grid.nx(), grid.ny());
        let hat = forward(&t, psi.component(0));
        let ny = grid.ny();
        let mut v1 = vec![Complex64::new(0.0, 0.0); hat.len()];
        let mut v2 = v1.clone();
        for (n, h) in hat.iter().enumerate() {
            let (i, j) = (n / ny, n % ny);
            let (k, xi) = wavevector(&grid, i, j);
            let k = if is_nyquist(i, grid.nx()) { 0.0 } else { k };
            let xi = if is_nyquist(j, ny) { 0.0 } else { xi };
            v1[n] = -Complex64::i() * xi * h;
            v2[n] = Complex64::i() * k * h;
        }
        Ok(Self {
            grid,
            params,
            time: 0.0,
            coefficients: [v1, v2],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &RossbyParameters {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>; 2] {
        &self.coefficients
    }

    /// Wavevector `(k, ξ_y)` of flat index `n`.
    pub fn wavevector(&self, n: usize) -> (f64, f64) {
        wavevector(&self.grid, n / self.grid.ny(), n % self.grid.ny())
    }

    pub fn divergence_defect(&self) -> f64 {
        divergence_defect(&self.grid, &self.coefficients)
    }

    /// Velocity in physical space.
    pub fn velocity(&self) -> Field {
        let t = Transform2::new(self.grid.nx(), self.grid.ny());
        let mut data = inverse(&t, &self.coefficients[0]);
        data.extend(inverse(&t, &self.coefficients[1]));
        Field::from_vec(self.grid, 2, 1, data).expect("layout matches the grid")
    }

    /// `∫ |v|²` over the box, by Parseval.
    pub fn energy(&self) -> f64 {
        let n = (self.grid.nx() * self.grid.ny()) as f64;
        let sum: f64 = self
            .coefficients
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum();
        sum * self.grid.cell_area() / n
    }

    /// Per-mode multiplier `exp(iωt − ν_h|k_h|²t)`.
    fn multiplier(&self, i: usize, j: usize, t: f64) -> Complex64 {
        let (k, xi) = wavevector(&self.grid, i, j);
        let norm2 = k * k + xi * xi;
        if norm2 == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let k_odd = if is_nyquist(i, self.grid.nx()) {
            0.0
        } else {
            k
        };
        let omega = self.params.beta * k_odd / (self.params.epsilon * norm2);
        Complex64::from_polar((-self.params.nu_h * norm2 * t).exp(), omega * t)
    }

    /// Exact propagation by `t ≥ 0`.
    pub fn propagate(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::parameter(
                "t",
                format!("must be non-negative, got {t}"),
            ));
        }
        let ny = self.grid.ny();
        let multipliers: Vec<Complex64> = (0..self.grid.nx() * ny)
            .into_par_iter()
            .map(|n| self.multiplier(n / ny, n % ny, t))
            .collect();
        let coefficients = self
            .coefficients
            .clone()
            .map(|c| c.iter().zip(&multipliers).map(|(a, m)| a * m).collect());
        Ok(Self {
            grid: self.grid,
            params: self.params,
            time: self.time + t,
            coefficients,
        })
    }

    /// Spectral vorticity `ζ̂ = i(k v̂₂ − ξ_y v̂₁)`.
    pub fn vorticity(&self) -> Vorticity {
        let ny = self.grid.ny();
        let values = self.coefficients[0]
            .iter()
            .zip(&self.coefficients[1])
            .enumerate()
            .map(|(n, (a, b))| {
                let (k, xi) = wavevector(&self.grid, n / ny, n % ny);
                Complex64::i() * (k * b - xi * a)
            })
            .collect();
        Vorticity {
            grid: self.grid,
            params: self.params,
            time: self.time,
            values,
        }
    }

    /// Local energy `∫_K |v|²` with trapezoid weights on the nodes inside `K`.
    pub fn local_energy(&self, region: &Region) -> Result<f64> {
        region.check(&self.grid)?;
        let v = self.velocity();
        let (wx, wy) = region.weights(&self.grid);
        let ny = self.grid.ny();
        let mut sum = 0.0;
        for (i, &a) in wx.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in wy.iter().enumerate() {
                let n = i * ny + j;
                sum += a * b * (v.component(0)[n].powi(2) + v.component(1)[n].powi(2));
            }
        }
        Ok(sum * self.grid.cell_area())
    }
}

/// Spectral vorticity with its own propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Vorticity {
    grid: Grid,
    params: RossbyParameters,
    time: f64,
    values: Vec<Complex64>,
}

impl Vorticity {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Solves `∂_t ζ + (β/ε) ∂_x Δ_h⁻¹ ζ − ν_h Δ_h ζ = 0` mode by mode.
    pub fn propagate(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::parameter(
                "t",
                format!("must be non-negative, got {t}"),
            ));
        }
        let ny = self.grid.ny();
        let p = self.params;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(n, z)| {
                let (i, j) = (n / ny, n % ny);
                let (k, xi) = wavevector(&self.grid, i, j);
                let norm2 = k * k + xi * xi;
                if norm2 == 0.0 {
                    return *z;
                }
                let k_odd = if is_nyquist(i, self.grid.nx()) {
                    0.0
                } else {
                    k
                };
                let rate = Complex64::new(-p.nu_h * norm2, p.beta * k_odd / (p.epsilon * norm2));
                z * (rate * t).exp()
            })
            .collect();
        Ok(Self {
            grid: self.grid,
            params: p,
            time: self.time + t,
            values,
        })
    }

    /// `v = ∇⊥Δ_h⁻¹ζ`; the mean flow at `k_h = 0` is not recoverable and is set to zero.
    pub fn velocity(&self) -> SpectralState {
        let ny = self.grid.ny();
        let mut v1 = vec![Complex64::new(0.0, 0.0); self.values.len()];
        let mut v2 = v1.clone();
        for (n, z) in self.values.iter().enumerate() {
            let (k, xi) = wavevector(&self.grid, n / ny, n % ny);
            let norm2 = k * k + xi * xi;
            if norm2 == 0.0 {
                continue;
            }
            let psi = -z / norm2;
            v1[n] = -Complex64::i() * xi * psi;
            v2[n] = Complex64::i() * k * psi;
        }
        SpectralState {
            grid: self.grid,
            params: self.params,
            time: self.time,
            coefficients: [v1, v2],
        }
    }
}

/// Splits a divergence-free velocity into its zonal mean and the rest.
pub fn decompose(velocity: &Field, tolerance: f64) -> Result<(Field, Field)> {
    let grid = *velocity.grid();
    let probe = RossbyParameters {
        epsilon: 1.0,
        beta: 0.0,
        nu_h: 0.0,
    };
    SpectralState::from_velocity(velocity, probe, tolerance)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut zonal = Field::zeros_horizontal(grid, 2);
    let mut rest = Field::zeros_horizontal(grid, 2);
    for c in 0..2 {
        let v = velocity.component(c);
        for j in 0..ny {
            let mean = (0..nx).map(|i| v[i * ny + j]).sum::<f64>() / nx as f64;
            for i in 0..nx {
                zonal.component_mut(c)[i * ny + j] = mean;
                rest.component_mut(c)[i * ny + j] = v[i * ny + j] - mean;
            }
        }
    }
    Ok((zonal, rest))
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]` in the horizontal domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Region {
    pub fn whole(grid: &Grid) -> Self {
        Self {
            x0: 0.0,
            x1: 2.0 * std::f64::consts::PI,
            y0: -grid.half_width(),
            y1: grid.half_width(),
        }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let l = grid.half_width();
        if !(0.0 <= self.x0
            && self.x0 < self.x1
            && self.x1 <= two_pi
            && -l <= self.y0
            && self.y0 < self.y1
            && self.y1 <= l)
        {
            return Err(Error::parameter(
                "region",
                format!("{self:?} is not inside [0, 2π] × [−{l}, {l}]"),
            ));
        }
        Ok(())
    }

    /// Trapezoid weights per axis; an axis covered entirely uses the periodic rule.
    fn weights(&self, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
        let two_pi = 2.0 * std::f64::consts::PI;
        let l = grid.half_width();
        let wx = axis_weights(
            &grid.longitudes(),
            self.x0,
            self.x1,
            self.x0 == 0.0 && self.x1 == two_pi,
        );
        let wy = axis_weights(
            &grid.latitudes(),
            self.y0,
            self.y1,
            self.y0 == -l && self.y1 == l,
        );
        (wx, wy)
    }
}

fn axis_weights(nodes: &[f64], lo: f64, hi: f64, full: bool) -> Vec<f64> {
    if full {
        return vec![1.0; nodes.len()];
    }
    let inside: Vec<usize> = (0..nodes.len())
        .filter(|&n| nodes[n] >= lo && nodes[n] <= hi)
        .collect();
    let mut w = vec![0.0; nodes.len()];
    for &n in &inside {
        w[n] = 1.0;
    }
    if inside.len() > 1 {
        w[inside[0]] = 0.5;
        w[*inside.last().unwrap()] = 0.5;
    }
    w
}

/// Gaussian Rossby packet: streamfunction `exp(κ(cos(x − x₀) − 1) − y²/(2w_y²)) cos(k₀x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePacket {
    pub wavenumber: f64,
    pub center_x: f64,
    /// Zonal width; the envelope concentration is `κ = 1/width_x²`.
    pub width_x: f64,
    pub width_y: f64,
}

impl WavePacket {
    pub fn streamfunction(&self, grid: Grid) -> Field {
        let kappa = self.width_x.powi(-2);
        Field::horizontal_from_fn(grid, |x, y| {
            let envelope = (kappa * ((x - self.center_x).cos() - 1.0)
                - y * y / (2.0 * self.width_y.powi(2)))
            .exp();
            [envelope * (self.wavenumber * x).cos()]
        })
    }

    /// Rectangle of half-widths `reach·width` around the packet centre.
    pub fn support(&self, reach: f64, grid: &Grid) -> Region {
        let two_pi = 2.0 * std::f64::consts::PI;
        let l = grid.half_width();
        Region {
            x0: (self.center_x - reach * self.width_x).max(0.0),
            x1: (self.center_x + reach * self.width_x).min(two_pi),
            y0: (-reach * self.width_y).max(-l),
            y1: (reach * self.width_y).min(l),
        }
    }

    /// Group velocity `∇_k ω` at the carrier wavevector `(k₀, 0)`.
    pub fn group_velocity(&self, beta: f64, epsilon: f64) -> [f64; 2] {
        let k = self.wavenumber;
        [-beta / (epsilon * k * k), 0.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_examples() {
        assert!((rossby_frequency(1.0, 0.0, 1.0, 0.1).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(rossby_frequency(0.0, 2.0, 1.0, 0.1).unwrap(), 0.0);
        assert!(rossby_frequency(0.0, 0.0, 1.0, 0.1).is_err());
        let a = rossby_frequency(3.0, 1.5, 1.0, 0.1).unwrap();
        let b = rossby_frequency(-3.0, 1.5, 1.0, 0.1).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn axis_weights_trapezoid() {
        let w = axis_weights(&[0.5, 1.5, 2.5, 3.5], 1.0, 3.0, false);
        assert_eq!(w, vec![0.0, 0.5, 0.5, 0.0]);
    }
}

use crate::ekman::pumping_jet;
use crate::error::{Error, Hypothesis, Result};
use crate::model::{
    CoriolisProfile, Field, Grid, Harmonic, LatitudeProfile, TruncatedCoriolis, WindStress,
};
use crate::numerics::fft::{zonal_antiderivative, zonal_means};

/// Relative size of a zonal mean of the pumping treated as zero.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-9;

/// Ekman pumping `w_δ` and `∂_y w_δ` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpingField {
    field: Field,
}

impl PumpingField {
    pub fn from_stress(
        stress: &WindStress,
        coriolis: &TruncatedCoriolis,
        grid: &Grid,
    ) -> Result<Self> {
        let mut field = Field::zeros_horizontal(*grid, 2);
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let [w, dw] = pumping_jet(stress, coriolis, grid.x(i), grid.y(j))?;
                field.set(0, i, j, 0, w);
                field.set(1, i, j, 0, dw);
            }
        }
        Ok(Self { field })
    }

    /// Wraps samples of `[w, ∂_y w]`.
    pub fn from_field(field: Field) -> Result<Self> {
        if field.components() != 2 || !field.is_horizontal() {
            return Err(Error::parameter(
                "pumping",
                "expects a horizontal field with components [w, dw/dy]",
            ));
        }
        Ok(Self { field })
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn w(&self) -> &[f64] {
        self.field.component(0)
    }

    pub fn dw_dy(&self) -> &[f64] {
        self.field.component(1)
    }

    pub fn as_field(&self) -> &Field {
        &self.field
    }
}

fn require_slope(b: [f64; 3], y: f64) -> Result<()> {
    if b[1] == 0.0 || !b[1].is_finite() {
        return Err(Error::hypothesis(
            Hypothesis::CoriolisProfile,
            format!("b' vanishes at y = {y}"),
        ));
    }
    Ok(())
}

/// Sverdrup relation `u₂ = (b/b') w`.
pub fn sverdrup_meridional(pumping: &PumpingField, base: &CoriolisProfile) -> Result<Field> {
    let grid = *pumping.grid();
    let mut out = Field::zeros_horizontal(grid, 1);
    for j in 0..grid.ny() {
        let y = grid.y(j);
        let b = base.eval(y);
        require_slope(b, y)?;
        for i in 0..grid.nx() {
            out.set(0, i, j, 0, b[0] / b[1] * pumping.w()[i * grid.ny() + j]);
        }
    }
    Ok(out)
}

/// `u₃ = z w`.
pub fn vertical_velocity(pumping: &PumpingField, z: f64) -> Field {
    let grid = *pumping.grid();
    let data = pumping.w().iter().map(|w| z * w).collect();
    Field::from_vec(grid, 1, 1, data).expect("same shape as the pumping")
}

/// Zonal velocity from `∂ₓu₁ = −(2 − bb''/b'²) w − (b/b') ∂_y w`, fixed to
/// zero zonal mean.
pub fn zonal_velocity(pumping: &PumpingField, base: &CoriolisProfile) -> Result<Field> {
    let grid = *pumping.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    check_zonal_means(pumping.w(), nx, ny, &grid)?;
    let mut rhs = vec![0.0; nx * ny];
    for j in 0..ny {
        let y = grid.y(j);
        let b = base.eval(y);
        require_slope(b, y)?;
        let c = 2.0 - b[0] * b[2] / (b[1] * b[1]);
        let r = b[0] / b[1];
        for i in 0..nx {
            let n = i * ny + j;
            rhs[n] = -c * pumping.w()[n] - r * pumping.dw_dy()[n];
        }
    }
    Field::from_vec(grid, 1, 1, zonal_antiderivative(&rhs, nx, ny))
}

fn check_zonal_means(w: &[f64], nx: usize, ny: usize, grid: &Grid) -> Result<()> {
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let means = zonal_means(w, nx, ny);
    if let Some((j, m)) = means
        .iter()
        .enumerate()
        .find(|(_, m)| m.abs() > COMPATIBILITY_TOLERANCE * scale)
    {
        return Err(Error::hypothesis(
            Hypothesis::StressCompatibility,
            format!(
                "zonal mean of the Ekman pumping is {m:.3e} at y = {}",
                grid.y(j)
            ),
        ));
    }
    Ok(())
}

/// One separable piece `g(y) H(x)` of the pumping.
#[derive(Debug, Clone, PartialEq)]
struct PumpingMode {
    amplitude: f64,
    latitude: LatitudeProfile,
    /// True when the stress term is zonal, so `g = −A (Y/b_δ)'`; otherwise `g = A Y/b_δ`.
    from_zonal: bool,
    harmonic: Harmonic,
    antiderivative: Harmonic,
}

impl PumpingMode {
    /// `[g, g']`.
    fn profile(&self, coriolis: &TruncatedCoriolis, y: f64) -> [f64; 2] {
        let [b, db, d2b] = coriolis.eval(y);
        let [v, d, d2] = self.latitude.eval(y);
        let a = self.amplitude;
        if self.from_zonal {
            let q1 = d / b - v * db / (b * b);
            let q2 = d2 / b - 2.0 * d * db / (b * b) - v * d2b / (b * b)
                + 2.0 * v * db * db / (b * b * b);
            [-a * q1, -a * q2]
        } else {
            [a * v / b, a * (d / b - v * db / (b * b))]
        }
    }
}

/// Pointwise interior flow `u^int = (u₁, u₂, z w_δ)` and pressure, in closed
/// form for stresses built from separable terms.
///
/// The pumping uses the truncated factor `b_δ`; the Sverdrup coefficients and
/// the pressure use the profile `b` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorFlow {
    coriolis: TruncatedCoriolis,
    modes: Vec<PumpingMode>,
}

/// Horizontal interior velocity and pressure at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSample {
    pub w: f64,
    pub velocity_h: [f64; 2],
    pub pressure: f64,
}

impl InteriorFlow {
    /// Fails when the stress violates zonal compatibility.
    pub fn new(stress: &WindStress, coriolis: TruncatedCoriolis) -> Result<Self> {
        let mut modes = Vec::new();
        for (component, term) in stress.terms() {
            if term.amplitude == 0.0 {
                continue;
            }
            let harmonic = if component == 0 {
                term.zonal
            } else {
                term.zonal.derivative()
            };
            if harmonic.m == 0 && harmonic.cos == 0.0 {
                continue;
            }
            let antiderivative = harmonic.antiderivative().ok_or_else(|| {
                Error::hypothesis(
                    Hypothesis::StressCompatibility,
                    "the zonal stress has a nonzero zonal mean, so the zonal velocity has no periodic antiderivative",
                )
            })?;
            modes.push(PumpingMode {
                amplitude: term.amplitude,
                latitude: term.latitude.clone(),
                from_zonal: component == 0,
                harmonic,
                antiderivative,
            });
        }
        Ok(Self { coriolis, modes })
    }

    pub fn coriolis(&self) -> &TruncatedCoriolis {
        &self.coriolis
    }

    /// `[w_δ, ∂_y w_δ]`.
    pub fn pumping(&self, x: f64, y: f64) -> [f64; 2] {
        self.modes.iter().fold([0.0; 2], |acc, m| {
            let [g, dg] = m.profile(&self.coriolis, y);
            let h = m.harmonic.eval(x);
            [acc[0] + g * h, acc[1] + dg * h]
        })
    }

    pub fn sample(&self, x: f64, y: f64) -> Result<InteriorSample> {
        let b = self.coriolis.base.eval(y);
        require_slope(b, y)?;
        let c = 2.0 - b[0] * b[2] / (b[1] * b[1]);
        let r = b[0] / b[1];
        let mut out = InteriorSample {
            w: 0.0,
            velocity_h: [0.0; 2],
            pressure: 0.0,
        };
        for m in &self.modes {
            let [g, dg] = m.profile(&self.coriolis, y);
            let h = m.harmonic.eval(x);
            let anti = m.antiderivative.eval(x);
            out.w += g * h;
            out.velocity_h[0] += (-c * g - r * dg) * anti;
            out.velocity_h[1] += r * g * h;
            out.pressure += b[0] * r * g * anti;
        }
        Ok(out)
    }

    pub fn velocity(&self, x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
        let s = self.sample(x, y)?;
        Ok([s.velocity_h[0], s.velocity_h[1], z * s.w])
    }

    /// Interior pressure; zero mean over every zonal circle.
    pub fn pressure(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.sample(x, y)?.pressure)
    }

    /// Horizontal velocity and pressure on the grid, components `[u₁, u₂, p]`.
    pub fn sample_grid(&self, grid: &Grid) -> Result<Field> {
        let mut out = Field::zeros_horizontal(*grid, 3);
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let s = self.sample(grid.x(i), grid.y(j))?;
                out.set(0, i, j, 0, s.velocity_h[0]);
                out.set(1, i, j, 0, s.velocity_h[1]);
                out.set(2, i, j, 0, s.pressure);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> TruncatedCoriolis {
        TruncatedCoriolis::exact(CoriolisProfile::linear(1.0))
    }

    #[test]
    fn linear_profile_example() {
        let s = WindStress::meridional_power(1.0, 2, 0.0, 1);
        let flow = InteriorFlow::new(&s, linear()).unwrap();
        for (x, y) in [(0.3, 0.7), (2.0, -1.5), (5.0, 0.05)] {
            let u = flow.velocity(x, y, 0.4).unwrap();
            assert!((u[0] + 3.0 * y * f64::sin(x)).abs() < 1e-13);
            assert!((u[1] - y * y * f64::cos(x)).abs() < 1e-13);
            assert!((u[2] - 0.4 * y * f64::cos(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_operators_match_closed_form() {
        let s = WindStress::meridional_power(1.0, 2, 0.0, 1);
        let grid = Grid::new(8, 16, 4, 2.0).unwrap();
        let p = PumpingField::from_stress(&s, &linear(), &grid).unwrap();
        let base = CoriolisProfile::linear(1.0);
        let u1 = zonal_velocity(&p, &base).unwrap();
        let u2 = sverdrup_meridional(&p, &base).unwrap();
        for i in 0..8 {
            for j in 0..16 {
                let (x, y) = (grid.x(i), grid.y(j));
                assert!((u1.get(0, i, j, 0) + 3.0 * y * x.sin()).abs() < 1e-12);
                assert!((u2.get(0, i, j, 0) - y * y * x.cos()).abs() < 1e-12);
            }
        }
        let u3 = vertical_velocity(&p, 1.0);
        assert_eq!(u3.component(0), p.w());
    }

    #[test]
    fn incompatible_stress_is_rejected() {
        let s = WindStress::zonal_power(1.0, 2, 0.0, Harmonic::constant(1.0));
        let err = InteriorFlow::new(&s, linear()).unwrap_err();
        assert_eq!(
            err.violated_hypothesis(),
            Some(Hypothesis::StressCompatibility)
        );
        let grid = Grid::new(8, 16, 4, 2.0).unwrap();
        let p = PumpingField::from_stress(&s, &linear(), &grid).unwrap();
        let err = zonal_velocity(&p, &CoriolisProfile::linear(1.0)).unwrap_err();
        assert_eq!(
            err.violated_hypothesis(),
            Some(Hypothesis::StressCompatibility)
        );
    }

    #[test]
    fn zero_pumping_gives_zero_velocity() {
        let grid = Grid::new(8, 16, 4, 2.0).unwrap();
        let p = PumpingField::from_stress(&WindStress::zero(), &linear(), &grid).unwrap();
        assert_eq!(
            zonal_velocity(&p, &CoriolisProfile::linear(1.0))
                .unwrap()
                .max_abs(),
            0.0
        );
    }
}

use num_complex::Complex64;

use crate::error::{Error, Hypothesis, Result};
use crate::model::{CoriolisProfile, Field};
use crate::numerics::fft::{odd_frequency, zonal_derivative, zonal_means, Transform2};

/// Default relative tolerance on the integrability defect `∂_y(b u₂) + ∂ₓ(b u₁)`.
pub const INTEGRABILITY_TOLERANCE: f64 = 1e-2;

/// Pressure with `∇_h p = (b u₂, −b u₁)`, zero mean over the grid.
///
/// Nonzero zonal modes are inverted from `∂ₓp = b u₂`; the zonal mean is
/// integrated in `y` from the southern edge with the trapezoidal rule.
pub fn interior_pressure(
    velocity_h: &Field,
    base: &CoriolisProfile,
    tolerance: f64,
) -> Result<Field> {
    if velocity_h.components() != 2 || !velocity_h.is_horizontal() {
        return Err(Error::parameter(
            "velocity_h",
            "expects a horizontal two-component field",
        ));
    }
    let grid = *velocity_h.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let b: Vec<f64> = grid.latitudes().iter().map(|&y| base.value(y)).collect();
    let bu1: Vec<f64> = (0..nx * ny)
        .map(|n| b[n % ny] * velocity_h.component(0)[n])
        .collect();
    let bu2: Vec<f64> = (0..nx * ny)
        .map(|n| b[n % ny] * velocity_h.component(1)[n])
        .collect();

    let defect = integrability_defect(&bu1, &bu2, nx, ny, grid.dy());
    let scale = defect.1.max(f64::MIN_POSITIVE);
    if defect.0 > tolerance * scale {
        return Err(Error::hypothesis(
            Hypothesis::Integrability,
            format!(
                "curl of b u_h is {:.3e} against a gradient scale {scale:.3e}",
                defect.0
            ),
        ));
    }

    let t = Transform2::new(nx, ny);
    let mut data: Vec<Complex64> = bu2.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    t.forward_x(&mut data);
    for i in 0..nx {
        let k = odd_frequency(i, nx, 1.0);
        let m = if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / k)
        };
        data[i * ny..(i + 1) * ny].iter_mut().for_each(|c| *c *= m);
    }
    t.inverse_x(&mut data);

    let mean_slope: Vec<f64> = zonal_means(&bu1, nx, ny).iter().map(|v| -v).collect();
    let mut mean = vec![0.0; ny];
    for j in 1..ny {
        mean[j] = mean[j - 1] + 0.5 * grid.dy() * (mean_slope[j - 1] + mean_slope[j]);
    }
    let offset = mean.iter().sum::<f64>() / ny as f64;

    let values = (0..nx * ny)
        .map(|n| data[n].re + mean[n % ny] - offset)
        .collect();
    Field::from_vec(grid, 1, 1, values)
}

/// `(max |∂_y(b u₂) + ∂ₓ(b u₁)|, max(|∂_y(b u₂)|, |∂ₓ(b u₁)|))` over interior rows.
fn integrability_defect(bu1: &[f64], bu2: &[f64], nx: usize, ny: usize, dy: f64) -> (f64, f64) {
    let dx1 = zonal_derivative(bu1, nx, ny);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..nx {
        for j in 1..ny - 1 {
            let n = i * ny + j;
            let dy2 = (bu2[n + 1] - bu2[n - 1]) / (2.0 * dy);
            worst = worst.max((dy2 + dx1[n]).abs());
            scale = scale.max(dy2.abs()).max(dx1[n].abs());
        }
    }
    (worst, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grid;

    #[test]
    fn zero_velocity_gives_zero_pressure() {
        let grid = Grid::new(8, 16, 4, 2.0).unwrap();
        let p = interior_pressure(
            &Field::zeros_horizontal(grid, 2),
            &CoriolisProfile::linear(1.0),
            1e-2,
        )
        .unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn non_gradient_is_rejected() {
        let grid = Grid::new(8, 16, 4, 2.0).unwrap();
        let u = Field::horizontal_from_fn(grid, |x, _| [0.0, x.cos()]);
        let err = interior_pressure(&u, &CoriolisProfile::linear(1.0), 1e-2).unwrap_err();
        assert_eq!(err.violated_hypothesis(), Some(Hypothesis::Integrability));
    }
}

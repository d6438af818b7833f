use num_complex::Complex64;

use crate::model::Grid;
use crate::numerics::fft::{signed_index, Transform2};

/// Discrete `H⁻¹(ω_h)` norm of one horizontal level, using the periodic
/// extension in `y` and Fourier weights `(1 + k² + ξ²)^{−1}` on the squared
/// coefficients, `ξ = π n / L`.
pub fn dual_norm(level: &[f64], grid: &Grid) -> f64 {
    dual_norm_with(&Transform2::new(grid.nx(), grid.ny()), level, grid)
}

pub(crate) fn dual_norm_with(t: &Transform2, level: &[f64], grid: &Grid) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    assert_eq!(level.len(), nx * ny);
    let mut data: Vec<Complex64> = level.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    t.forward(&mut data);
    let unit_y = std::f64::consts::PI / grid.half_width();
    let mut sum = 0.0;
    for i in 0..nx {
        let k = signed_index(i, nx) as f64;
        for j in 0..ny {
            let xi = unit_y * signed_index(j, ny) as f64;
            sum += data[i * ny + j].norm_sqr() / (1.0 + k * k + xi * xi);
        }
    }
    let n = (nx * ny) as f64;
    (sum * grid.cell_area() * nx as f64 * ny as f64 / (n * n)).sqrt()
}

/// Largest magnitude on the two edge rows `y = ±L` relative to the largest
/// magnitude overall; small values mean the periodic extension in `y` is harmless.
pub fn edge_ratio(level: &[f64], grid: &Grid) -> f64 {
    let ny = grid.ny();
    let max = level.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let edge = level
        .iter()
        .enumerate()
        .filter(|(n, _)| n % ny == 0 || n % ny == ny - 1)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    edge / max
}

/// Discrete `L²(ω_h)` norm of one level with the midpoint rule.
pub fn l2_level(level: &[f64], grid: &Grid) -> f64 {
    (level.iter().map(|v| v * v).sum::<f64>() * grid.cell_area()).sqrt()
}

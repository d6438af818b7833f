use num_complex::Complex64;

use crate::ekman::BoundaryLayerProfile;
use crate::error::{Error, Hypothesis, Result};
use crate::model::{Field, Grid};
use crate::numerics::fft::{signed_index, zonal_derivative, zonal_multiplier, Transform2};
use crate::numerics::tridiagonal::solve_tridiagonal_complex;

/// Default bound on `|mean φ₃| / mean |φ₃|`.
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-2;

/// Bottom traces of the surface layer that the corrector lifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottomTrace {
    /// `φ_h = −∂_z u^BL_h` at `z = 0`.
    pub phi_h: [f64; 2],
    pub div_phi_h: f64,
    /// `φ₃ = −u^BL_3` at `z = 0`.
    pub phi_3: f64,
}

impl BottomTrace {
    /// `Δ_h χ = φ₃ + div_h φ_h / 6`.
    pub fn source(&self) -> f64 {
        self.phi_3 + self.div_phi_h / 6.0
    }
}

/// Divergence-free field `v_h = −((1−z)²/2) φ_h + ∇_h χ`,
/// `v₃ = −div_h φ_h (1−z)³/6 + (1−z) Δ_h χ`, cancelling the bottom traces of
/// the surface layer.
///
/// `χ` is solved spectrally in `x` and with second-order differences in `y`,
/// vanishing at `y = ±L`; `Δ_h χ` is taken equal to its source so that all
/// boundary values are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct BottomCorrector {
    layer: BoundaryLayerProfile,
    grid: Grid,
    traces: Vec<BottomTrace>,
    chi: Vec<f64>,
    grad_chi: [Vec<f64>; 2],
    discrete_laplacian: Vec<f64>,
}

pub fn bottom_trace(layer: &BoundaryLayerProfile, x: f64, y: f64) -> Result<BottomTrace> {
    let col = layer.column(x, y)?;
    let eps = layer.epsilon();
    let bottom = 1.0 / eps;
    let d = col.dzeta_velocity_h(bottom);
    Ok(BottomTrace {
        phi_h: [d[0] / eps, d[1] / eps],
        div_phi_h: col.dzeta_div_h(bottom) / eps,
        phi_3: -col.velocity_3(bottom),
    })
}

impl BottomCorrector {
    pub fn new(layer: &BoundaryLayerProfile, grid: &Grid, mean_tolerance: f64) -> Result<Self> {
        let (nx, ny) = (grid.nx(), grid.ny());
        let traces = (0..nx * ny)
            .map(|n| bottom_trace(layer, grid.x(n / ny), grid.y(n % ny)))
            .collect::<Result<Vec<_>>>()?;

        let mean = traces.iter().map(|t| t.phi_3).sum::<f64>() / traces.len() as f64;
        let mean_abs = traces.iter().map(|t| t.phi_3.abs()).sum::<f64>() / traces.len() as f64;
        if mean.abs() > mean_tolerance * mean_abs {
            return Err(Error::hypothesis(
                Hypothesis::ZeroMeanSource,
                format!("mean of the bottom vertical trace is {mean:.3e} against a mean magnitude {mean_abs:.3e}"),
            ));
        }

        let source: Vec<f64> = traces.iter().map(BottomTrace::source).collect();
        let chi = solve_poisson(&source, grid);
        let grad_x = zonal_derivative(&chi, nx, ny);
        let dy = grid.dy();
        let mut grad_y = vec![0.0; nx * ny];
        let mut lap_y = vec![0.0; nx * ny];
        for i in 0..nx {
            let row = &chi[i * ny..(i + 1) * ny];
            for j in 0..ny {
                let south = if j == 0 { -row[0] } else { row[j - 1] };
                let north = if j + 1 == ny {
                    -row[ny - 1]
                } else {
                    row[j + 1]
                };
                grad_y[i * ny + j] = (north - south) / (2.0 * dy);
                lap_y[i * ny + j] = (north - 2.0 * row[j] + south) / (dy * dy);
            }
        }
        let lap_x = zonal_multiplier(&chi, nx, ny, |i| {
            let k = signed_index(i, nx) as f64;
            Complex64::new(-k * k, 0.0)
        });
        let discrete_laplacian = lap_x.iter().zip(&lap_y).map(|(a, b)| a + b).collect();
        Ok(Self {
            layer: layer.clone(),
            grid: *grid,
            traces,
            chi,
            grad_chi: [grad_x, grad_y],
            discrete_laplacian,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layer(&self) -> &BoundaryLayerProfile {
        &self.layer
    }

    pub fn trace(&self, i: usize, j: usize) -> &BottomTrace {
        &self.traces[i * self.grid.ny() + j]
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn grad_chi(&self, i: usize, j: usize) -> [f64; 2] {
        let n = i * self.grid.ny() + j;
        [self.grad_chi[0][n], self.grad_chi[1][n]]
    }

    /// Five-point-in-`y`, spectral-in-`x` Laplacian of the computed `χ`.
    pub fn discrete_laplacian(&self, i: usize, j: usize) -> f64 {
        self.discrete_laplacian[i * self.grid.ny() + j]
    }

    pub fn velocity(&self, i: usize, j: usize, z: f64) -> [f64; 3] {
        let t = self.trace(i, j);
        let g = self.grad_chi(i, j);
        let s = 1.0 - z;
        [
            -0.5 * s * s * t.phi_h[0] + g[0],
            -0.5 * s * s * t.phi_h[1] + g[1],
            -t.div_phi_h * s * s * s / 6.0 + s * t.source(),
        ]
    }

    /// `∂_z v` at a grid column.
    pub fn dz_velocity(&self, i: usize, j: usize, z: f64) -> [f64; 3] {
        let t = self.trace(i, j);
        let s = 1.0 - z;
        [
            s * t.phi_h[0],
            s * t.phi_h[1],
            0.5 * t.div_phi_h * s * s - t.source(),
        ]
    }

    /// Velocity on the grid, three components, all levels.
    pub fn sample(&self) -> Field {
        let g = self.grid;
        let mut out = Field::zeros_volume(g, 3);
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                for k in 0..g.nz() {
                    let v = self.velocity(i, j, g.z(k));
                    for (c, value) in v.into_iter().enumerate() {
                        out.set(c, i, j, k, value);
                    }
                }
            }
        }
        out
    }
}

/// `Δχ = f` with `χ = 0` at `y = ±L` (ghost values of opposite sign).
fn solve_poisson(source: &[f64], grid: &Grid) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let t = Transform2::new(nx, ny);
    let mut data: Vec<Complex64> = source.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    t.forward_x(&mut data);
    let h2 = grid.dy().powi(2);
    let off = vec![1.0 / h2; ny];
    for i in 0..nx {
        let k = signed_index(i, nx) as f64;
        let mut diag = vec![-2.0 / h2 - k * k; ny];
        diag[0] -= 1.0 / h2;
        diag[ny - 1] -= 1.0 / h2;
        let row = &mut data[i * ny..(i + 1) * ny];
        let solved = solve_tridiagonal_complex(&off, &diag, &off, row);
        row.copy_from_slice(&solved);
    }
    t.inverse_x(&mut data);
    data.iter().map(|c| c.re).collect()
}

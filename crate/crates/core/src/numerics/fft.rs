use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Signed integer frequency of DFT index `i` for length `n`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// True for the unpaired Nyquist index of an even-length transform.
pub fn is_nyquist(i: usize, n: usize) -> bool {
    n % 2 == 0 && i == n / 2
}

/// Frequency used by odd-order derivatives: zero at the Nyquist index so real
/// data stays real.
pub fn odd_frequency(i: usize, n: usize, unit: f64) -> f64 {
    if is_nyquist(i, n) {
        0.0
    } else {
        unit * signed_index(i, n) as f64
    }
}

/// Plans for two-dimensional transforms of arrays stored with the second
/// index contiguous (`data[i * ny + j]`).
#[derive(Clone)]
pub struct Transform2 {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    bx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    by: Arc<dyn Fft<f64>>,
}

impl Transform2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fx: planner.plan_fft_forward(nx),
            bx: planner.plan_fft_inverse(nx),
            fy: planner.plan_fft_forward(ny),
            by: planner.plan_fft_inverse(ny),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Unnormalized forward transform in both directions.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.along_y(data, &self.fy);
        self.along_x(data, &self.fx);
    }

    /// Inverse transform including the `1/(nx ny)` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.along_x(data, &self.bx);
        self.along_y(data, &self.by);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Unnormalized forward transform along x only.
    pub fn forward_x(&self, data: &mut [Complex64]) {
        self.along_x(data, &self.fx);
    }

    /// Inverse transform along x only, normalized by `1/nx`.
    pub fn inverse_x(&self, data: &mut [Complex64]) {
        self.along_x(data, &self.bx);
        let scale = 1.0 / self.nx as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    fn along_y(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.nx * self.ny);
        for row in data.chunks_exact_mut(self.ny) {
            plan.process(row);
        }
    }

    fn along_x(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.nx * self.ny);
        let mut column = vec![Complex64::new(0.0, 0.0); self.nx];
        for j in 0..self.ny {
            for (i, c) in column.iter_mut().enumerate() {
                *c = data[i * self.ny + j];
            }
            plan.process(&mut column);
            for (i, c) in column.iter().enumerate() {
                data[i * self.ny + j] = *c;
            }
        }
    }
}

/// Applies `f(k)` to every zonal Fourier coefficient of real samples laid out
/// as `values[i * ny + j]` on a `2π`-periodic longitude grid.
pub fn zonal_multiplier(
    values: &[f64],
    nx: usize,
    ny: usize,
    f: impl Fn(usize) -> Complex64,
) -> Vec<f64> {
    let t = Transform2::new(nx, ny);
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    t.forward_x(&mut data);
    for i in 0..nx {
        let m = f(i);
        data[i * ny..(i + 1) * ny].iter_mut().for_each(|c| *c *= m);
    }
    t.inverse_x(&mut data);
    data.iter().map(|c| c.re).collect()
}

/// Spectral `∂ₓ` on a `2π`-periodic grid.
pub fn zonal_derivative(values: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    zonal_multiplier(values, nx, ny, |i| {
        Complex64::new(0.0, odd_frequency(i, nx, 1.0))
    })
}

/// Zero-mean zonal antiderivative; the mean and Nyquist modes are dropped.
pub fn zonal_antiderivative(values: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    zonal_multiplier(values, nx, ny, |i| {
        let k = odd_frequency(i, nx, 1.0);
        if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / k)
        }
    })
}

/// Zonal mean of each latitude row.
pub fn zonal_means(values: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    (0..ny)
        .map(|j| (0..nx).map(|i| values[i * ny + j]).sum::<f64>() / nx as f64)
        .collect()
}

impl std::fmt::Debug for Transform2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform2")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

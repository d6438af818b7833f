use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tensor grid on `ω = T × [-L, L] × [0, 1]`.
///
/// Longitudes are uniform on the periodic interval `[0, 2π)`. Latitudes are
/// cell centres of `ny` equal cells of `[-L, L]`; with `ny` even no node sits
/// on the equator. Heights include both ends of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
    half_width: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub half_width: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.nx, s.ny, s.nz, s.half_width)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            nx: g.nx,
            ny: g.ny,
            nz: g.nz,
            half_width: g.half_width,
        }
    }
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize, half_width: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n < 4 {
                return Err(Error::parameter(
                    name,
                    format!("needs at least 4 points, got {n}"),
                ));
            }
        }
        if ny % 2 != 0 {
            return Err(Error::parameter(
                "ny",
                "must be even so that no node lies on the equator",
            ));
        }
        if !(half_width >= 2.0 && half_width.is_finite()) {
            return Err(Error::parameter(
                "half_width",
                format!("must be at least 2, got {half_width}"),
            ));
        }
        Ok(Self {
            nx,
            ny,
            nz,
            half_width,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        TAU / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_width / self.ny as f64
    }

    pub fn dz(&self) -> f64 {
        1.0 / (self.nz - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.dx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.dy()
    }

    pub fn z(&self, k: usize) -> f64 {
        self.dz() * k as f64
    }

    pub fn longitudes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn latitudes(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn heights(&self) -> Vec<f64> {
        (0..self.nz).map(|k| self.z(k)).collect()
    }

    /// Area of one horizontal cell.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Trapezoidal weights on the vertical nodes.
    pub fn z_weights(&self) -> Vec<f64> {
        let dz = self.dz();
        (0..self.nz)
            .map(|k| {
                if k == 0 || k + 1 == self.nz {
                    0.5 * dz
                } else {
                    dz
                }
            })
            .collect()
    }

    /// Same domain with every resolution doubled (`nz` keeps its end nodes).
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            ny: 2 * self.ny,
            nz: 2 * self.nz - 1,
            half_width: self.half_width,
        }
    }

    pub fn with_nz(&self, nz: usize) -> Result<Self> {
        Self::new(self.nx, self.ny, nz, self.half_width)
    }
}

/// Samples of a scalar or vector field on a [`Grid`].
///
/// Horizontal fields have one level; volume fields have `nz` levels. Storage
/// is component-major, then longitude, latitude and level.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    components: usize,
    levels: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros_horizontal(grid: Grid, components: usize) -> Self {
        Self {
            grid,
            components,
            levels: 1,
            data: vec![0.0; components * grid.nx * grid.ny],
        }
    }

    pub fn zeros_volume(grid: Grid, components: usize) -> Self {
        let levels = grid.nz;
        Self {
            grid,
            components,
            levels,
            data: vec![0.0; components * grid.nx * grid.ny * levels],
        }
    }

    /// Builds a horizontal field from `f(x, y) -> components`.
    pub fn horizontal_from_fn<const C: usize>(
        grid: Grid,
        mut f: impl FnMut(f64, f64) -> [f64; C],
    ) -> Self {
        let mut out = Self::zeros_horizontal(grid, C);
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                let v = f(grid.x(i), grid.y(j));
                for (c, value) in v.into_iter().enumerate() {
                    out.set(c, i, j, 0, value);
                }
            }
        }
        out
    }

    /// Wraps existing samples; fails on a size mismatch or non-finite entries.
    pub fn from_vec(grid: Grid, components: usize, levels: usize, data: Vec<f64>) -> Result<Self> {
        if levels != 1 && levels != grid.nz {
            return Err(Error::parameter(
                "levels",
                format!("must be 1 or {}, got {levels}", grid.nz),
            ));
        }
        if data.len() != components * grid.nx * grid.ny * levels {
            return Err(Error::parameter(
                "data",
                "sample count does not match the grid",
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("field contains non-finite samples".into()));
        }
        Ok(Self {
            grid,
            components,
            levels,
            data,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn is_horizontal(&self) -> bool {
        self.levels == 1
    }

    #[inline]
    pub fn index(&self, c: usize, i: usize, j: usize, k: usize) -> usize {
        ((c * self.grid.nx + i) * self.grid.ny + j) * self.levels + k
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.index(c, i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, i: usize, j: usize, k: usize, value: f64) {
        let idx = self.index(c, i, j, k);
        self.data[idx] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Samples of one component.
    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.nx * self.grid.ny * self.levels;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.nx * self.grid.ny * self.levels;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `L²` norm over the horizontal cells and, for volume fields,
    /// the trapezoidal rule in `z`; all components included.
    pub fn l2_norm(&self) -> f64 {
        let zw = if self.is_horizontal() {
            vec![1.0]
        } else {
            self.grid.z_weights()
        };
        let mut sum = 0.0;
        for c in 0..self.components {
            for i in 0..self.grid.nx {
                for j in 0..self.grid.ny {
                    for (k, w) in zw.iter().enumerate() {
                        sum += w * self.get(c, i, j, k).powi(2);
                    }
                }
            }
        }
        (sum * self.grid.cell_area()).sqrt()
    }

    /// Pointwise difference; panics on mismatched shapes.
    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(
            (self.components, self.levels, self.grid),
            (other.components, other.levels, other.grid)
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Field {
            grid: self.grid,
            components: self.components,
            levels: self.levels,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd_grids() {
        assert!(Grid::new(3, 8, 8, 4.0).is_err());
        assert!(Grid::new(8, 9, 8, 4.0).is_err());
        assert!(Grid::new(8, 8, 8, 1.5).is_err());
    }

    #[test]
    fn latitudes_avoid_equator_symmetrically() {
        let g = Grid::new(8, 16, 5, 2.0).unwrap();
        let ys = g.latitudes();
        assert!(ys.iter().all(|y| y.abs() > 1e-12));
        for j in 0..16 {
            assert!((ys[j] + ys[15 - j]).abs() < 1e-14);
        }
    }

    #[test]
    fn l2_norm_of_constant() {
        let g = Grid::new(8, 16, 5, 2.0).unwrap();
        let f = Field::horizontal_from_fn(g, |_, _| [2.0]);
        let area = std::f64::consts::TAU * 4.0;
        assert!((f.l2_norm() - 2.0 * area.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn from_vec_rejects_nan() {
        let g = Grid::new(4, 4, 4, 2.0).unwrap();
        let mut data = vec![0.0; 16];
        data[3] = f64::NAN;
        assert!(Field::from_vec(g, 1, 1, data).is_err());
    }
}

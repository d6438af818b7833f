use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corrector::{BottomCorrector, ZERO_MEAN_TOLERANCE};
use super::sverdrup::InteriorFlow;
use crate::ekman::BoundaryLayerProfile;
use crate::error::Result;
use crate::model::{
    validate_coriolis, validate_windstress, CoriolisProfile, CoriolisTolerances, Field, Grid,
    Parameters, StressTolerances, TruncatedCoriolis, WindStress,
};
use crate::numerics::Rule;
use crate::residual::{delta_report, DEFAULT_MARGIN};

/// Gates applied while assembling a stationary solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AssemblyOptions {
    /// Ratio bound used for every `≪` of the truncation-width conditions.
    pub delta_margin: f64,
    /// Bound on `|mean φ₃| / mean |φ₃|` for the corrector source.
    pub corrector_mean_tolerance: f64,
    pub coriolis: CoriolisTolerances,
    pub stress: StressTolerances,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            delta_margin: DEFAULT_MARGIN,
            corrector_mean_tolerance: ZERO_MEAN_TOLERANCE,
            coriolis: CoriolisTolerances::default(),
            stress: StressTolerances::default(),
        }
    }
}

/// `u^stat = u^BL + u^int + v^int` with its pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    params: Parameters,
    grid: Grid,
    layer: BoundaryLayerProfile,
    interior: InteriorFlow,
    corrector: BottomCorrector,
}

/// Velocity of each part at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryParts {
    pub layer: [f64; 3],
    pub interior: [f64; 3],
    pub corrector: [f64; 3],
}

impl StationaryParts {
    pub fn total(&self) -> [f64; 3] {
        std::array::from_fn(|c| self.layer[c] + self.interior[c] + self.corrector[c])
    }
}

/// `L²(ω)` sizes of the parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeNorms {
    pub layer_h: f64,
    pub layer_3: f64,
    pub interior: f64,
    pub corrector: f64,
}

/// Rule on `z ∈ [0, 1]` refined geometrically towards the surface layer.
pub fn layer_aware_rule(epsilon: f64) -> Rule {
    let r = Rule::geometric(0.125, 1.0 / epsilon, 8);
    Rule {
        nodes: r.nodes.iter().map(|s| 1.0 - epsilon * s).collect(),
        weights: r.weights.iter().map(|w| epsilon * w).collect(),
    }
}

/// Builds the stationary solution after checking every hypothesis it relies on.
pub fn assemble_stationary(
    params: &Parameters,
    base: &CoriolisProfile,
    stress: &WindStress,
    grid: &Grid,
    options: &AssemblyOptions,
) -> Result<StationarySolution> {
    params.validate()?;
    validate_coriolis(base, grid, &options.coriolis).into_result()?;
    validate_windstress(stress, grid, &options.stress).into_result()?;
    delta_report(
        params.epsilon,
        params.nu_h,
        params.delta,
        options.delta_margin,
    )
    .into_result()?;
    let coriolis = TruncatedCoriolis::new(base.clone(), params.delta, params.alpha)?;
    let layer = BoundaryLayerProfile::new(stress.clone(), coriolis.clone(), params.epsilon)?;
    let interior = InteriorFlow::new(stress, coriolis)?;
    let corrector = BottomCorrector::new(&layer, grid, options.corrector_mean_tolerance)?;
    Ok(StationarySolution {
        params: *params,
        grid: *grid,
        layer,
        interior,
        corrector,
    })
}

/// Builds the stationary solution with the Coriolis factor itself in place of
/// `b_δ`. Only meaningful for stresses vanishing fast enough at the equator
/// that the layer needs no truncation.
pub fn assemble_untruncated(
    params: &Parameters,
    base: &CoriolisProfile,
    stress: &WindStress,
    grid: &Grid,
    options: &AssemblyOptions,
) -> Result<StationarySolution> {
    params.validate()?;
    validate_coriolis(base, grid, &options.coriolis).into_result()?;
    validate_windstress(stress, grid, &options.stress).into_result()?;
    let coriolis = TruncatedCoriolis::exact(base.clone());
    let layer = BoundaryLayerProfile::new(stress.clone(), coriolis.clone(), params.epsilon)?;
    let interior = InteriorFlow::new(stress, coriolis)?;
    let corrector = BottomCorrector::new(&layer, grid, options.corrector_mean_tolerance)?;
    Ok(StationarySolution {
        params: *params,
        grid: *grid,
        layer,
        interior,
        corrector,
    })
}

impl StationarySolution {
    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layer(&self) -> &BoundaryLayerProfile {
        &self.layer
    }

    pub fn interior(&self) -> &InteriorFlow {
        &self.interior
    }

    pub fn corrector(&self) -> &BottomCorrector {
        &self.corrector
    }

    pub fn coriolis(&self) -> &TruncatedCoriolis {
        self.interior.coriolis()
    }

    /// Parts at grid column `(i, j)` and height `z`.
    pub fn parts(&self, i: usize, j: usize, z: f64) -> Result<StationaryParts> {
        let (x, y) = (self.grid.x(i), self.grid.y(j));
        let col = self.layer.column(x, y)?;
        let zeta = (1.0 - z) / self.params.epsilon;
        let [u, v] = col.velocity_h(zeta);
        Ok(StationaryParts {
            layer: [u, v, col.velocity_3(zeta)],
            interior: self.interior.velocity(x, y, z)?,
            corrector: self.corrector.velocity(i, j, z),
        })
    }

    pub fn velocity(&self, i: usize, j: usize, z: f64) -> Result<[f64; 3]> {
        Ok(self.parts(i, j, z)?.total())
    }

    /// `p^stat = P^BL((1 − z)/ε) + p^int/ε`, the pressure entering the full
    /// momentum equation.
    pub fn pressure(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        let zeta = (1.0 - z) / self.params.epsilon;
        Ok(self.layer.pressure(x, y, zeta)? + self.interior.pressure(x, y)? / self.params.epsilon)
    }

    /// Total velocity on the grid's `z` levels.
    pub fn sample(&self) -> Result<Field> {
        let g = self.grid;
        let ny = g.ny();
        let heights = g.heights();
        let columns: Vec<Vec<[f64; 3]>> = (0..g.nx() * ny)
            .into_par_iter()
            .map(|n| {
                heights
                    .iter()
                    .map(|&z| self.velocity(n / ny, n % ny, z))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut out = Field::zeros_volume(g, 3);
        for (n, col) in columns.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                for (c, &value) in v.iter().enumerate() {
                    out.set(c, n / ny, n % ny, k, value);
                }
            }
        }
        Ok(out)
    }

    /// Sizes of the parts over `ω`, horizontal midpoint rule and a
    /// layer-refined Gauss rule in `z`.
    pub fn size_norms(&self) -> Result<SizeNorms> {
        let g = self.grid;
        let ny = g.ny();
        let eps = self.params.epsilon;
        let rule = layer_aware_rule(eps);
        let cells: Vec<[f64; 4]> = (0..g.nx() * ny)
            .into_par_iter()
            .map(|n| {
                let (i, j) = (n / ny, n % ny);
                let (x, y) = (g.x(i), g.y(j));
                let col = self.layer.column(x, y)?;
                let layer_h = eps * col.horizontal_energy_to(1.0 / eps);
                let layer_3 = rule.integrate(|z| col.velocity_3((1.0 - z) / eps).powi(2));
                let s = self.interior.sample(x, y)?;
                let interior = s.velocity_h[0].powi(2) + s.velocity_h[1].powi(2) + s.w * s.w / 3.0;
                let corrector = rule
                    .integrate(|z| self.corrector.velocity(i, j, z).iter().map(|v| v * v).sum());
                Ok([layer_h, layer_3, interior, corrector])
            })
            .collect::<Result<_>>()?;
        let mut sums = [0.0; 4];
        for c in &cells {
            for (s, v) in sums.iter_mut().zip(c) {
                *s += v;
            }
        }
        let norm = |s: f64| (s * g.cell_area()).sqrt();
        Ok(SizeNorms {
            layer_h: norm(sums[0]),
            layer_3: norm(sums[1]),
            interior: norm(sums[2]),
            corrector: norm(sums[3]),
        })
    }

    /// Boundary-condition defects relative to the largest trace involved:
    /// `[∂_z u_h(0), u₃(0), u₃(1), ∂_z u_h(1) − σ/ε²]`.
    pub fn boundary_defects(&self) -> Result<[f64; 4]> {
        let g = self.grid;
        let eps = self.params.epsilon;
        let mut worst = [0.0f64; 4];
        let mut scale = [0.0f64; 4];
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let (x, y) = (g.x(i), g.y(j));
                let col = self.layer.column(x, y)?;
                let s = self.interior.sample(x, y)?;
                let sigma = self.layer.stress().value(x, y);

                let bl_bottom = col.dzeta_velocity_h(1.0 / eps);
                let corr = self.corrector.dz_velocity(i, j, 0.0);
                for c in 0..2 {
                    let layer_dz = -bl_bottom[c] / eps;
                    worst[0] = worst[0].max((layer_dz + corr[c]).abs());
                    scale[0] = scale[0].max(layer_dz.abs());
                }
                let u3_layer_bottom = col.velocity_3(1.0 / eps);
                let bottom = u3_layer_bottom + self.corrector.velocity(i, j, 0.0)[2];
                worst[1] = worst[1].max(bottom.abs());
                scale[1] = scale[1].max(u3_layer_bottom.abs());

                let top = col.velocity_3(0.0) + s.w + self.corrector.velocity(i, j, 1.0)[2];
                worst[2] = worst[2].max(top.abs());
                scale[2] = scale[2].max(s.w.abs());

                let surface = col.dzeta_velocity_h(0.0);
                let corr_top = self.corrector.dz_velocity(i, j, 1.0);
                for c in 0..2 {
                    let dz = -surface[c] / eps + corr_top[c];
                    let target = sigma[c] / (eps * eps);
                    worst[3] = worst[3].max((dz - target).abs());
                    scale[3] = scale[3].max(target.abs());
                }
            }
        }
        Ok(std::array::from_fn(|k| {
            if scale[k] > 0.0 {
                worst[k] / scale[k]
            } else {
                worst[k]
            }
        }))
    }
}

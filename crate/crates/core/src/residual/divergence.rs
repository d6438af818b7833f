use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interior::{bottom_trace, layer_aware_rule, StationarySolution};
use crate::numerics::fit_power_law;

/// Divergence of `u^stat` measured with centred differences at a sequence of
/// halved steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceCheck {
    /// Horizontal steps; the vertical step is `ε` times each.
    pub steps: Vec<f64>,
    /// Largest `|div u|` over the sample points for each step.
    pub max_divergence: Vec<f64>,
    /// Fitted order of `max_divergence` against the step.
    pub order: f64,
    /// Largest `|Δ_d χ − S|`, the part of the divergence not controlled by the step.
    pub poisson_defect: f64,
}

/// Latitudes closer to the equator than this are skipped; the layer varies
/// on the scale `|y|` there and no fixed step resolves it.
pub const DIVERGENCE_MIN_LATITUDE: f64 = 0.25;

/// Checks that the divergence of the assembled velocity vanishes at second
/// order. The layer, interior and the trace part of the corrector are
/// differenced in `(x, y, z)`; the potential part `∇χ` contributes its
/// discrete Laplacian, which the Poisson solve matches to the source.
pub fn divergence_check(
    sol: &StationarySolution,
    base_step: f64,
    halvings: usize,
) -> Result<DivergenceCheck> {
    let g = *sol.grid();
    let eps = sol.params().epsilon;
    let rule = layer_aware_rule(eps);
    let heights: Vec<f64> = rule
        .nodes
        .iter()
        .step_by(4)
        .copied()
        .chain([0.5, 0.25])
        .collect();
    let columns: Vec<(usize, usize)> = (0..g.nx())
        .flat_map(|i| (0..g.ny()).map(move |j| (i, j)))
        .filter(|&(_, j)| g.y(j).abs() >= DIVERGENCE_MIN_LATITUDE)
        .collect();
    if columns.is_empty() {
        return Err(Error::parameter("grid", "no columns away from the equator"));
    }
    let poisson_defect = columns
        .iter()
        .map(|&(i, j)| {
            let c = sol.corrector();
            (c.discrete_laplacian(i, j) - c.trace(i, j).source()).abs()
        })
        .fold(0.0f64, f64::max);

    let analytic = |x: f64, y: f64, z: f64| -> Result<[f64; 3]> {
        let zeta = (1.0 - z) / eps;
        let layer = sol.layer();
        let uh = layer.velocity_h(x, y, zeta)?;
        let u3 = layer.velocity_3(x, y, zeta)?;
        let int = sol.interior().velocity(x, y, z)?;
        let t = bottom_trace(layer, x, y)?;
        let s = 1.0 - z;
        Ok([
            uh[0] + int[0] - 0.5 * s * s * t.phi_h[0],
            uh[1] + int[1] - 0.5 * s * s * t.phi_h[1],
            u3 + int[2] - t.div_phi_h * s * s * s / 6.0 + s * t.source(),
        ])
    };

    let steps: Vec<f64> = (0..=halvings)
        .map(|n| base_step / 2f64.powi(n as i32))
        .collect();
    let mut max_divergence = Vec::with_capacity(steps.len());
    for &h in &steps {
        let hz = eps * h;
        let worst = columns
            .par_iter()
            .map(|&(i, j)| {
                let (x, y) = (g.x(i), g.y(j));
                let lap_chi = sol.corrector().discrete_laplacian(i, j);
                let mut worst = 0.0f64;
                for &z in &heights {
                    let z = z.clamp(hz, 1.0 - hz);
                    let du = (analytic(x + h, y, z)?[0] - analytic(x - h, y, z)?[0]) / (2.0 * h);
                    let dv = (analytic(x, y + h, z)?[1] - analytic(x, y - h, z)?[1]) / (2.0 * h);
                    let dw = (analytic(x, y, z + hz)?[2] - analytic(x, y, z - hz)?[2]) / (2.0 * hz);
                    worst = worst.max((du + dv + dw + lap_chi).abs());
                }
                Ok(worst)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        max_divergence.push(worst);
    }
    let order = fit_power_law(&steps, &max_divergence).map_or(f64::NAN, |f| f.slope);
    Ok(DivergenceCheck {
        steps,
        max_divergence,
        order,
        poisson_defect,
    })
}

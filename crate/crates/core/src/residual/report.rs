use rayon::prelude::*;
use serde::Serialize;

use super::norms::{dual_norm_with, edge_ratio};
use super::operator::{CellData, PointResidual};
use crate::error::Result;
use crate::interior::{layer_aware_rule, StationarySolution};
use crate::numerics::fft::Transform2;

/// Which norm a reported term is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    HMinus1,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermNorm {
    pub name: &'static str,
    pub norm: NormKind,
    pub value: f64,
}

/// Norms of the residual splits of the stationary equations.
///
/// `r_h1`, `r_31` are `L²(ω)` norms; `r_h2`, `r_32` are
/// `L²(0, 1; H⁻¹(ω_h))` norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub epsilon: f64,
    pub nu_h: f64,
    pub delta: f64,
    pub r_h1: f64,
    pub r_h2: f64,
    pub r_31: f64,
    pub r_32: f64,
    /// `r_h2/√ν_h`, absent when `ν_h = 0`.
    pub r_h2_scaled: Option<f64>,
    /// `r_32/√ν_h`, absent when `ν_h = 0`.
    pub r_32_scaled: Option<f64>,
    pub terms: Vec<TermNorm>,
    /// Largest gap between the operator applied to the total field and the
    /// sum of the named terms, relative to the largest summand of the operator.
    pub breakdown_defect: f64,
    /// Largest edge-row magnitude of the viscous residual relative to its maximum.
    pub edge_ratio: f64,
}

const L2_TERMS: [&str; 6] = [
    "truncation",
    "layer_pressure",
    "corrector_horizontal",
    "geostrophic",
    "layer_vertical",
    "corrector_vertical",
];
const DUAL_TERMS: [&str; 6] = [
    "viscous_layer_horizontal",
    "viscous_interior_horizontal",
    "viscous_corrector_horizontal",
    "viscous_layer_vertical",
    "viscous_interior_vertical",
    "viscous_corrector_vertical",
];

fn l2_parts(r: &PointResidual) -> [f64; 8] {
    let sq = |a: [f64; 2]| a[0] * a[0] + a[1] * a[1];
    let [a, b] = r.r1_h();
    [
        a * a + b * b,
        r.r1_3().powi(2),
        sq(r.truncation),
        sq(r.layer_pressure),
        sq(r.corrector_h),
        sq(r.geostrophic),
        r.layer_vertical.powi(2),
        r.corrector_vertical.powi(2),
    ]
}

/// Dual-norm fields: `r²_h` (two components), `r²₃`, then each viscous term by component.
fn dual_parts(r: &PointResidual) -> [f64; 12] {
    let [a, b] = r.r2_h();
    [
        a,
        b,
        r.r2_3(),
        r.viscous_layer_h[0],
        r.viscous_layer_h[1],
        r.viscous_interior_h[0],
        r.viscous_interior_h[1],
        r.viscous_corrector_h[0],
        r.viscous_corrector_h[1],
        r.viscous_layer_3,
        r.viscous_interior_3,
        r.viscous_corrector_3,
    ]
}

/// Applies the stationary operator at every grid column and the nodes of a
/// layer-refined rule in `z`, and measures every split.
pub fn residual_report(sol: &StationarySolution) -> Result<ResidualReport> {
    let g = *sol.grid();
    let ny = g.ny();
    let n = g.nx() * ny;
    let cells: Vec<CellData> = (0..n)
        .into_par_iter()
        .map(|c| CellData::new(sol, c / ny, c % ny))
        .collect::<Result<_>>()?;
    let rule = layer_aware_rule(sol.params().epsilon);
    let transform = Transform2::new(g.nx(), ny);

    let mut l2 = [0.0; 8];
    let mut dual = [0.0; 12];
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    let mut edge = 0.0f64;
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let level: Vec<PointResidual> = cells.par_iter().map(|c| c.residual(z)).collect();
        for r in &level {
            for (s, v) in l2.iter_mut().zip(l2_parts(r)) {
                *s += w * v;
            }
            defect = defect.max(r.breakdown_defect());
            scale = scale.max(r.operator_scale);
        }
        let fields: Vec<Vec<f64>> = (0..12)
            .map(|k| level.iter().map(|r| dual_parts(r)[k]).collect())
            .collect();
        let norms: Vec<f64> = fields
            .par_iter()
            .map(|f| dual_norm_with(&transform, f, &g))
            .collect();
        for (s, v) in dual.iter_mut().zip(&norms) {
            *s += w * v * v;
        }
        for f in &fields[..3] {
            edge = edge.max(edge_ratio(f, &g));
        }
    }

    let area = g.cell_area();
    let l2n: Vec<f64> = l2.iter().map(|s| (s * area).sqrt()).collect();
    let pair = |a: f64, b: f64| (a + b).sqrt();
    let r_h2 = pair(dual[0], dual[1]);
    let r_32 = dual[2].sqrt();
    let nu = sol.params().nu_h;
    let mut terms: Vec<TermNorm> = L2_TERMS
        .iter()
        .zip(&l2n[2..])
        .map(|(&name, &value)| TermNorm {
            name,
            norm: NormKind::L2,
            value,
        })
        .collect();
    let dual_values = [
        pair(dual[3], dual[4]),
        pair(dual[5], dual[6]),
        pair(dual[7], dual[8]),
        dual[9].sqrt(),
        dual[10].sqrt(),
        dual[11].sqrt(),
    ];
    terms.extend(
        DUAL_TERMS
            .iter()
            .zip(dual_values)
            .map(|(&name, value)| TermNorm {
                name,
                norm: NormKind::HMinus1,
                value,
            }),
    );
    let params = sol.params();
    Ok(ResidualReport {
        epsilon: params.epsilon,
        nu_h: nu,
        delta: params.delta,
        r_h1: l2n[0],
        r_h2,
        r_31: l2n[1],
        r_32,
        r_h2_scaled: (nu > 0.0).then(|| r_h2 / nu.sqrt()),
        r_32_scaled: (nu > 0.0).then(|| r_32 / nu.sqrt()),
        terms,
        breakdown_defect: if scale > 0.0 { defect / scale } else { defect },
        edge_ratio: edge,
    })
}

impl ResidualReport {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

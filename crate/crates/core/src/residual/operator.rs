use crate::ekman::{BoundaryLayerProfile, Column};
use crate::error::Result;
use crate::interior::{bottom_trace, BottomTrace, StationarySolution};
use crate::model::Field;

/// Named contributions to the residual at one point.
///
/// Horizontal terms `r¹_h`: surface-layer truncation mismatch
/// `(1/ε)(b − b_δ)U⊥`, the layer pressure gradient `∇_h p^BL`, the corrector's
/// `(1/ε) b v_h⊥ − ε∂_zz v_h`, and the interior geostrophic defect. Viscous
/// terms `r²` are `−ν_h Δ_h` of each part. Vertical terms `r¹₃` are the layer
/// balance `(1/ε²)∂_z p^BL − ε∂_zz u^BL_3` and the corrector's `−ε∂_zz v₃`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointResidual {
    pub truncation: [f64; 2],
    pub layer_pressure: [f64; 2],
    pub corrector_h: [f64; 2],
    pub geostrophic: [f64; 2],
    pub viscous_layer_h: [f64; 2],
    pub viscous_interior_h: [f64; 2],
    pub viscous_corrector_h: [f64; 2],
    pub layer_vertical: f64,
    pub corrector_vertical: f64,
    pub viscous_layer_3: f64,
    pub viscous_interior_3: f64,
    pub viscous_corrector_3: f64,
    /// The full operator applied to `u^stat`, horizontal then vertical.
    pub total: [f64; 3],
    /// Largest magnitude among the summands of the operator route before cancellation.
    pub operator_scale: f64,
}

impl PointResidual {
    pub fn r1_h(&self) -> [f64; 2] {
        std::array::from_fn(|c| {
            self.truncation[c] + self.layer_pressure[c] + self.corrector_h[c] + self.geostrophic[c]
        })
    }

    pub fn r2_h(&self) -> [f64; 2] {
        std::array::from_fn(|c| {
            self.viscous_layer_h[c] + self.viscous_interior_h[c] + self.viscous_corrector_h[c]
        })
    }

    pub fn r1_3(&self) -> f64 {
        self.layer_vertical + self.corrector_vertical
    }

    pub fn r2_3(&self) -> f64 {
        self.viscous_layer_3 + self.viscous_interior_3 + self.viscous_corrector_3
    }

    /// Largest absolute difference between the operator route and the sum of terms.
    pub fn breakdown_defect(&self) -> f64 {
        let [a, b] = self.r1_h();
        let [c, d] = self.r2_h();
        (self.total[0] - a - c)
            .abs()
            .max((self.total[1] - b - d).abs())
            .max((self.total[2] - self.r1_3() - self.r2_3()).abs())
    }

    /// Largest magnitude of any single term.
    pub fn term_scale(&self) -> f64 {
        let vectors = [
            self.truncation,
            self.layer_pressure,
            self.corrector_h,
            self.geostrophic,
            self.viscous_layer_h,
            self.viscous_interior_h,
            self.viscous_corrector_h,
        ];
        let scalars = [
            self.layer_vertical,
            self.corrector_vertical,
            self.viscous_layer_3,
            self.viscous_interior_3,
            self.viscous_corrector_3,
        ];
        vectors
            .iter()
            .flatten()
            .chain(scalars.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Finite-difference stencil: centre, `x ± h`, `y ± h`.
#[derive(Debug, Clone, Copy)]
struct Stencil<T> {
    c: T,
    xp: T,
    xm: T,
    yp: T,
    ym: T,
    h: f64,
}

impl<T> Stencil<T> {
    fn build(x: f64, y: f64, h: f64, mut f: impl FnMut(f64, f64) -> Result<T>) -> Result<Self> {
        Ok(Self {
            c: f(x, y)?,
            xp: f(x + h, y)?,
            xm: f(x - h, y)?,
            yp: f(x, y + h)?,
            ym: f(x, y - h)?,
            h,
        })
    }

    fn gradient(&self, g: impl Fn(&T) -> f64) -> [f64; 2] {
        [
            (g(&self.xp) - g(&self.xm)) / (2.0 * self.h),
            (g(&self.yp) - g(&self.ym)) / (2.0 * self.h),
        ]
    }

    fn laplacian(&self, g: impl Fn(&T) -> f64) -> f64 {
        (g(&self.xp) + g(&self.xm) + g(&self.yp) + g(&self.ym) - 4.0 * g(&self.c))
            / (self.h * self.h)
    }
}

/// Everything about one grid column that does not depend on `z`.
#[derive(Debug, Clone)]
pub(crate) struct CellData {
    epsilon: f64,
    nu_h: f64,
    b: f64,
    b_delta: f64,
    layer: Stencil<Column>,
    interior_u: [f64; 2],
    interior_lap_u: [f64; 2],
    interior_lap_w: f64,
    interior_grad_p: [f64; 2],
    trace: BottomTrace,
    lap_phi_h: [f64; 2],
    lap_div_phi: f64,
    grad_source: [f64; 2],
    lap_source: f64,
    grad_chi: [f64; 2],
}

/// Step for horizontal finite differences at latitude `y`.
pub fn horizontal_step(y: f64) -> f64 {
    BoundaryLayerProfile::gradient_step(y)
}

impl CellData {
    pub(crate) fn new(sol: &StationarySolution, i: usize, j: usize) -> Result<Self> {
        let g = sol.grid();
        let (x, y) = (g.x(i), g.y(j));
        let h = horizontal_step(y);
        let layer_profile = sol.layer();
        let layer = Stencil::build(x, y, h, |x, y| layer_profile.column(x, y))?;
        let traces = Stencil::build(x, y, h, |x, y| bottom_trace(layer_profile, x, y))?;
        let interior = Stencil::build(x, y, h, |x, y| sol.interior().sample(x, y))?;
        let params = sol.params();
        Ok(Self {
            epsilon: params.epsilon,
            nu_h: params.nu_h,
            b: sol.coriolis().base.value(y),
            b_delta: sol.coriolis().value(y),
            layer,
            interior_u: interior.c.velocity_h,
            interior_lap_u: [
                interior.laplacian(|s| s.velocity_h[0]),
                interior.laplacian(|s| s.velocity_h[1]),
            ],
            interior_lap_w: interior.laplacian(|s| s.w),
            interior_grad_p: interior.gradient(|s| s.pressure),
            trace: traces.c,
            lap_phi_h: [
                traces.laplacian(|t| t.phi_h[0]),
                traces.laplacian(|t| t.phi_h[1]),
            ],
            lap_div_phi: traces.laplacian(|t| t.div_phi_h),
            grad_source: traces.gradient(|t| t.source()),
            lap_source: traces.laplacian(|t| t.source()),
            grad_chi: sol.corrector().grad_chi(i, j),
        })
    }

    pub(crate) fn residual(&self, z: f64) -> PointResidual {
        let eps = self.epsilon;
        let nu = self.nu_h;
        let zeta = (1.0 - z) / eps;
        let s = 1.0 - z;
        let l = &self.layer;

        let u = l.c.velocity_h(zeta);
        let dzz_u = l.c.dzeta2_velocity_h(zeta);
        let grad_div = l.gradient(|c| c.div_h(zeta));
        let lap_u = [
            l.laplacian(|c| c.velocity_h(zeta)[0]),
            l.laplacian(|c| c.velocity_h(zeta)[1]),
        ];
        let lap_u3 = l.laplacian(|c| c.velocity_3(zeta));
        let dzeta_div = l.c.dzeta_div_h(zeta);
        let dzz_u3_layer = l.c.dzeta2_velocity_3(zeta);

        let t = &self.trace;
        let v = [
            -0.5 * s * s * t.phi_h[0] + self.grad_chi[0],
            -0.5 * s * s * t.phi_h[1] + self.grad_chi[1],
        ];
        let lap_v = [
            -0.5 * s * s * self.lap_phi_h[0] + self.grad_source[0],
            -0.5 * s * s * self.lap_phi_h[1] + self.grad_source[1],
        ];
        let lap_v3 = -self.lap_div_phi * s * s * s / 6.0 + s * self.lap_source;

        let perp = |a: [f64; 2]| [-a[1], a[0]];
        let (up, vp, ip) = (perp(u), perp(v), perp(self.interior_u));
        let gap = self.b - self.b_delta;
        let e3 = eps.powi(3);

        let mut r = PointResidual {
            truncation: [gap * up[0] / eps, gap * up[1] / eps],
            layer_pressure: [-e3 * grad_div[0], -e3 * grad_div[1]],
            corrector_h: std::array::from_fn(|c| self.b * vp[c] / eps + eps * t.phi_h[c]),
            geostrophic: std::array::from_fn(|c| (self.b * ip[c] + self.interior_grad_p[c]) / eps),
            viscous_layer_h: [-nu * lap_u[0], -nu * lap_u[1]],
            viscous_interior_h: [-nu * self.interior_lap_u[0], -nu * self.interior_lap_u[1]],
            viscous_corrector_h: [-nu * lap_v[0], -nu * lap_v[1]],
            layer_vertical: dzeta_div - dzz_u3_layer / eps,
            corrector_vertical: eps * s * t.div_phi_h,
            viscous_layer_3: -nu * lap_u3,
            viscous_interior_3: -nu * z * self.interior_lap_w,
            viscous_corrector_3: -nu * lap_v3,
            total: [0.0; 3],
            operator_scale: 0.0,
        };

        let uh: [f64; 2] = std::array::from_fn(|c| u[c] + self.interior_u[c] + v[c]);
        let uhp = perp(uh);
        let grad_p: [f64; 2] =
            std::array::from_fn(|c| -e3 * grad_div[c] + self.interior_grad_p[c] / eps);
        let dzz_uh: [f64; 2] = std::array::from_fn(|c| dzz_u[c] / (eps * eps) - t.phi_h[c]);
        let lap_uh: [f64; 2] =
            std::array::from_fn(|c| lap_u[c] + self.interior_lap_u[c] + lap_v[c]);
        let mut scale = 0.0f64;
        for c in 0..2 {
            let parts = [
                self.b * uhp[c] / eps,
                grad_p[c],
                -eps * dzz_uh[c],
                -nu * lap_uh[c],
            ];
            r.total[c] = parts.iter().sum();
            scale = parts.iter().fold(scale, |m, v| m.max(v.abs()));
        }
        let dz_p = eps * eps * dzeta_div;
        let dzz_u3 = dzz_u3_layer / (eps * eps) - s * t.div_phi_h;
        let lap_total3 = lap_u3 + z * self.interior_lap_w + lap_v3;
        let parts = [dz_p / (eps * eps), -eps * dzz_u3, -nu * lap_total3];
        r.total[2] = parts.iter().sum();
        r.operator_scale = parts.iter().fold(scale, |m, v| m.max(v.abs()));
        r
    }
}

/// Residual of the full stationary operator on the grid's `z` levels;
/// components are the two horizontal equations and the vertical one.
pub fn apply_stationary_operator(sol: &StationarySolution) -> Result<Field> {
    use rayon::prelude::*;
    let g = *sol.grid();
    let ny = g.ny();
    let heights = g.heights();
    let columns: Vec<Vec<[f64; 3]>> = (0..g.nx() * ny)
        .into_par_iter()
        .map(|n| {
            let cell = CellData::new(sol, n / ny, n % ny)?;
            Ok(heights.iter().map(|&z| cell.residual(z).total).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = Field::zeros_volume(g, 3);
    for (n, col) in columns.iter().enumerate() {
        for (k, r) in col.iter().enumerate() {
            for (c, &value) in r.iter().enumerate() {
                out.set(c, n / ny, n % ny, k, value);
            }
        }
    }
    Ok(out)
}

//! Temperature advected by the stationary flow.
//!
//! The full problem is `u^stat·∇θ − η²λΔ_hθ − λ∂_zzθ = 0` with `θ = θ₁` at the
//! surface and no flux at the bottom. Its approximation is
//! `θ^app = θ̄ + εθ^BL((1 − z)/ε) + εθ̃`, where `θ̄` solves the same problem with
//! the interior velocity and no horizontal diffusion, `θ^BL` is the closed-form
//! response to the Ekman layer and `θ̃` is affine in `z`.
//!
//! Both discrete problems use second-order differences in `z`, first-order
//! upwinding of horizontal advection and centred horizontal diffusion. They
//! are solved by Gauss–Seidel over columns, red-black in `x` and alternating
//! in `y`, with one tridiagonal solve per column.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ekman::{BoundaryLayerProfile, Column};
use crate::error::{Error, Hypothesis, Result};
use crate::interior::{assemble_untruncated, AssemblyOptions, InteriorFlow, StationarySolution};
use crate::model::{CoriolisProfile, Field, Grid, Parameters, TruncatedCoriolis, WindStress};
use crate::numerics::strictly_decreasing;
use crate::numerics::tridiagonal::solve_tridiagonal;

/// Vanishing order of the stress at the equator assumed by default.
pub const DEFAULT_VANISHING_ORDER: u32 = 4;

/// Step of the centred differences used for `∇_h u^int_h`.
const GRADIENT_STEP: f64 = 1e-5;

/// Surface temperature `θ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceTemperature {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · exp(−gaussian · y²)`.
    Gaussian {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        gaussian: f64,
    },
    /// `amplitude · cos(m x) · exp(−gaussian · y²)`.
    Wave {
        amplitude: f64,
        m: u32,
        gaussian: f64,
    },
}

impl SurfaceTemperature {
    /// `[θ₁, ∂_xθ₁, ∂_yθ₁]`.
    pub fn eval(&self, x: f64, y: f64) -> [f64; 3] {
        match *self {
            Self::Constant { value } => [value, 0.0, 0.0],
            Self::Gaussian {
                offset,
                amplitude,
                gaussian,
            } => {
                let e = amplitude * (-gaussian * y * y).exp();
                [offset + e, 0.0, -2.0 * gaussian * y * e]
            }
            Self::Wave {
                amplitude,
                m,
                gaussian,
            } => {
                let e = amplitude * (-gaussian * y * y).exp();
                let m = m as f64;
                let (s, c) = (m * x).sin_cos();
                [c * e, -m * s * e, -2.0 * gaussian * y * c * e]
            }
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)[0]
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let [_, dx, dy] = self.eval(x, y);
        [dx, dy]
    }

    pub fn sample(&self, grid: &Grid) -> Field {
        Field::horizontal_from_fn(*grid, |x, y| [self.value(x, y)])
    }
}

/// `θ^BL` in one column: `(1/λ) Re[(A·∇θ₁) e^{−λ⁺ζ}/(λ⁺)³]` with `A = σ + iσ⊥`.
///
/// The sum over both decay rates collapses to a real part because `λ⁻` is the
/// conjugate of `λ⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerTemperature {
    coefficient: Complex64,
    rate: Complex64,
}

impl LayerTemperature {
    pub fn new(column: &Column, gradient: [f64; 2], lambda_heat: f64) -> Self {
        let [a1, a2] = column.amplitude();
        Self {
            coefficient: (a1 * gradient[0] + a2 * gradient[1]) / lambda_heat,
            rate: column.decay_rate(),
        }
    }

    fn weighted(&self, zeta: f64, power: i32) -> f64 {
        (self.coefficient * (-self.rate * zeta).exp() / self.rate.powi(power)).re
    }

    pub fn value(&self, zeta: f64) -> f64 {
        self.weighted(zeta, 3)
    }

    /// `∂_ζθ^BL`.
    pub fn dzeta(&self, zeta: f64) -> f64 {
        -self.weighted(zeta, 2)
    }

    /// `∂_ζζθ^BL`.
    pub fn dzeta2(&self, zeta: f64) -> f64 {
        self.weighted(zeta, 1)
    }

    /// `θ̃(z) = (z − 1)(1/ε)∂_ζθ^BL(1/ε) − θ^BL(0)`.
    pub fn lid(&self, epsilon: f64, z: f64) -> f64 {
        (z - 1.0) * self.dzeta(1.0 / epsilon) / epsilon - self.value(0.0)
    }

    /// `εθ^BL((1 − z)/ε) + εθ̃(z)`.
    pub fn correction(&self, epsilon: f64, z: f64) -> f64 {
        epsilon * (self.value((1.0 - z) / epsilon) + self.lid(epsilon, z))
    }
}

/// `θ^BL(x, y, ζ)`.
pub fn bl_temperature(
    layer: &BoundaryLayerProfile,
    surface: &SurfaceTemperature,
    lambda_heat: f64,
    x: f64,
    y: f64,
    zeta: f64,
) -> Result<f64> {
    let column = layer.column(x, y)?;
    Ok(LayerTemperature::new(&column, surface.gradient(x, y), lambda_heat).value(zeta))
}

/// `θ̃(z)` for the layer temperature of one column.
pub fn lid_corrector(layer: &LayerTemperature, epsilon: f64, z: f64) -> f64 {
    layer.lid(epsilon, z)
}

/// Controls of the column Gauss–Seidel iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Bound on the largest nodal residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Weight of each column update, in `(0, 1]`.
    pub relaxation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 20_000,
            relaxation: 1.0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::parameter(
                "tolerance",
                format!("must be positive, got {}", self.tolerance),
            ));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::parameter(
                "relaxation",
                format!("must lie in (0, 1], got {}", self.relaxation),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::parameter("max_iterations", "must be positive"));
        }
        Ok(())
    }
}

/// Discrete temperature on the grid nodes with its surface data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureField {
    #[serde(skip)]
    theta: Field,
    #[serde(skip)]
    surface: Field,
    pub lambda_heat: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl TemperatureField {
    pub fn grid(&self) -> &Grid {
        self.theta.grid()
    }

    pub fn theta(&self) -> &Field {
        &self.theta
    }

    pub fn surface(&self) -> &Field {
        &self.surface
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.theta.get(0, i, j, k)
    }

    /// `[max |θ(1) − θ₁|, max |∂_zθ(0)|]`, the latter by a one-sided
    /// second-order difference.
    pub fn boundary_defects(&self) -> [f64; 2] {
        let g = self.grid();
        let top = g.nz() - 1;
        let dz = g.dz();
        let mut out = [0.0f64; 2];
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                out[0] = out[0].max((self.value(i, j, top) - self.surface.get(0, i, j, 0)).abs());
                let d = (-3.0 * self.value(i, j, 0) + 4.0 * self.value(i, j, 1)
                    - self.value(i, j, 2))
                    / (2.0 * dz);
                out[1] = out[1].max(d.abs());
            }
        }
        out
    }

    /// Largest excursion of `θ` outside `[min θ₁, max θ₁]`.
    pub fn max_principle_defect(&self) -> f64 {
        let (lo, hi) = range(self.surface.data());
        let (tlo, thi) = range(self.theta.data());
        (lo - tlo).max(thi - hi).max(0.0)
    }
}

fn range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Largest Frobenius norm of `∇_h u^int_h` over the grid columns.
pub fn interior_gradient_norm(interior: &InteriorFlow, grid: &Grid) -> Result<f64> {
    let ny = grid.ny();
    let h = GRADIENT_STEP;
    let norms: Vec<f64> = (0..grid.nx() * ny)
        .into_par_iter()
        .map(|n| {
            let (x, y) = (grid.x(n / ny), grid.y(n % ny));
            let u = |x: f64, y: f64| interior.sample(x, y).map(|s| s.velocity_h);
            let (e, w, nn, s) = (u(x + h, y)?, u(x - h, y)?, u(x, y + h)?, u(x, y - h)?);
            let sum: f64 = (0..2)
                .map(|c| ((e[c] - w[c]) / (2.0 * h)).powi(2) + ((nn[c] - s[c]) / (2.0 * h)).powi(2))
                .sum();
            Ok(sum.sqrt())
        })
        .collect::<Result<_>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Refuses interior flows whose horizontal gradient exceeds `λ/4`.
pub fn check_gradient_bound(interior: &InteriorFlow, grid: &Grid, lambda_heat: f64) -> Result<f64> {
    let norm = interior_gradient_norm(interior, grid)?;
    if norm > 0.25 * lambda_heat {
        return Err(Error::hypothesis(
            Hypothesis::AdvectionGradientBound,
            format!(
                "max |grad u_int_h| = {norm:.4e} exceeds lambda/4 = {:.4e}",
                0.25 * lambda_heat
            ),
        ));
    }
    Ok(norm)
}

fn check_lambda(lambda_heat: f64) -> Result<()> {
    if !(lambda_heat > 0.0 && lambda_heat.is_finite()) {
        return Err(Error::parameter(
            "lambda_heat",
            format!("must be positive, got {lambda_heat}"),
        ));
    }
    Ok(())
}

/// Solves `−λ∂_zzθ̄ + u^int·∇θ̄ = 0`, `θ̄(1) = θ₁`, `∂_zθ̄(0) = 0`.
pub fn solve_interior_temperature(
    interior: &InteriorFlow,
    surface: &SurfaceTemperature,
    lambda_heat: f64,
    grid: &Grid,
    options: &SolverOptions,
) -> Result<TemperatureField> {
    check_lambda(lambda_heat)?;
    check_gradient_bound(interior, grid, lambda_heat)?;
    let heights = grid.heights();
    let ny = grid.ny();
    let columns: Vec<Vec<[f64; 3]>> = (0..grid.nx() * ny)
        .into_par_iter()
        .map(|n| {
            let s = interior.sample(grid.x(n / ny), grid.y(n % ny))?;
            Ok(heights
                .iter()
                .map(|&z| [s.velocity_h[0], s.velocity_h[1], z * s.w])
                .collect())
        })
        .collect::<Result<_>>()?;
    let velocity: Vec<[f64; 3]> = columns.into_iter().flatten().collect();
    let system = ColumnSystem::new(*grid, lambda_heat, 0.0, &velocity, surface.sample(grid));
    system.solve(None, options)
}

/// Solves `u^stat·∇θ − η²λΔ_hθ − λ∂_zzθ = 0`, `θ(1) = θ₁`, `∂_zθ(0) = 0`,
/// starting from `start` when given.
pub fn solve_full_temperature(
    flow: &StationarySolution,
    surface: &SurfaceTemperature,
    lambda_heat: f64,
    start: Option<&TemperatureField>,
    options: &SolverOptions,
) -> Result<TemperatureField> {
    check_lambda(lambda_heat)?;
    check_gradient_bound(flow.interior(), flow.grid(), lambda_heat)?;
    let grid = *flow.grid();
    let sampled = flow.sample()?;
    let n = grid.nx() * grid.ny() * grid.nz();
    let velocity: Vec<[f64; 3]> = (0..n)
        .map(|m| std::array::from_fn(|c| sampled.component(c)[m]))
        .collect();
    let kappa = flow.params().eta.powi(2) * lambda_heat;
    let system = ColumnSystem::new(grid, lambda_heat, kappa, &velocity, surface.sample(&grid));
    system.solve(start.map(|s| s.theta.data()), options)
}

/// `θ^app = θ̄ + εθ^BL((1 − z)/ε) + εθ̃` on the nodes of `interior`.
pub fn approximate_temperature(
    interior: &TemperatureField,
    layer: &BoundaryLayerProfile,
    surface: &SurfaceTemperature,
) -> Result<Field> {
    let g = *interior.grid();
    let eps = layer.epsilon();
    let heights = g.heights();
    let ny = g.ny();
    let columns: Vec<Vec<f64>> = (0..g.nx() * ny)
        .into_par_iter()
        .map(|n| {
            let (i, j) = (n / ny, n % ny);
            let (x, y) = (g.x(i), g.y(j));
            let bl = LayerTemperature::new(
                &layer.column(x, y)?,
                surface.gradient(x, y),
                interior.lambda_heat,
            );
            Ok(heights
                .iter()
                .enumerate()
                .map(|(k, &z)| interior.value(i, j, k) + bl.correction(eps, z))
                .collect())
        })
        .collect::<Result<_>>()?;
    Field::from_vec(g, 1, g.nz(), columns.into_iter().flatten().collect())
}

/// `(λ∫|∂_zθ̄|², ½∫u^int₃(1)θ₁² − ∫θ̄ u^int_h·∇_hθ₁)`, equal for exact solutions.
pub fn interior_energy_balance(
    field: &TemperatureField,
    interior: &InteriorFlow,
    surface: &SurfaceTemperature,
) -> Result<[f64; 2]> {
    let g = *field.grid();
    let (dz, nz) = (g.dz(), g.nz());
    let weights = g.z_weights();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let (x, y) = (g.x(i), g.y(j));
            let s = interior.sample(x, y)?;
            let [t1, gx, gy] = surface.eval(x, y);
            let adv = s.velocity_h[0] * gx + s.velocity_h[1] * gy;
            rhs += 0.5 * s.w * t1 * t1;
            for k in 0..nz {
                rhs -= weights[k] * field.value(i, j, k) * adv;
                if k + 1 < nz {
                    lhs += field.lambda_heat
                        * (field.value(i, j, k + 1) - field.value(i, j, k)).powi(2)
                        / dz;
                }
            }
        }
    }
    let area = g.cell_area();
    Ok([lhs * area, rhs * area])
}

/// `(‖e‖_{L²(ω)}, ‖∂_z e‖_{L²(ω)})` for a nodal field `e`, the second by
/// differences over each vertical cell.
pub fn error_norms(error: &Field) -> (f64, f64) {
    let g = *error.grid();
    let dz = g.dz();
    let mut dsum = 0.0;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            for k in 0..g.nz() - 1 {
                dsum += (error.get(0, i, j, k + 1) - error.get(0, i, j, k)).powi(2) / dz;
            }
        }
    }
    (error.l2_norm(), (dsum * g.cell_area()).sqrt())
}

/// Inputs of the convergence study in `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoclineSetup {
    pub coriolis: CoriolisProfile,
    pub stress: WindStress,
    pub surface: SurfaceTemperature,
    pub lambda_heat: f64,
    pub grid: Grid,
    /// Required order of the zero of `σ` at the equator.
    #[serde(default = "default_order")]
    pub vanishing_order: u32,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub assembly: AssemblyOptions,
}

fn default_order() -> u32 {
    DEFAULT_VANISHING_ORDER
}

impl ThermoclineSetup {
    /// Checks the stress order; the remaining hypotheses are checked by the solvers.
    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda_heat)?;
        self.solver.validate()?;
        if self.stress.is_zero() {
            return Ok(());
        }
        match self.stress.vanishing_order() {
            Some(k) if k >= self.vanishing_order => Ok(()),
            found => Err(Error::hypothesis(
                Hypothesis::StressVanishingOrder,
                format!(
                    "the layer temperature needs a stress vanishing to order {} at the equator, found {}",
                    self.vanishing_order,
                    found.map_or_else(|| "unknown".to_owned(), |k| k.to_string())
                ),
            )),
        }
    }

    fn interior_flow(&self) -> Result<InteriorFlow> {
        InteriorFlow::new(
            &self.stress,
            TruncatedCoriolis::exact(self.coriolis.clone()),
        )
    }

    fn flow(&self, epsilon: f64) -> Result<StationarySolution> {
        let params = Parameters::distinguished(epsilon, 0.0, epsilon, 0.7)?
            .with_lambda_heat(self.lambda_heat);
        assemble_untruncated(
            &params,
            &self.coriolis,
            &self.stress,
            &self.grid,
            &self.assembly,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEntry {
    pub epsilon: f64,
    /// `‖θ − θ^app‖_{L²(ω)}`.
    pub l2_error: f64,
    /// `‖∂_z(θ − θ^app)‖_{L²(ω)}`.
    pub dz_error: f64,
    pub iterations: usize,
    pub residual: f64,
    pub max_principle_defect: f64,
}

impl ConvergenceEntry {
    pub fn total(&self) -> f64 {
        self.l2_error + self.dz_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub lambda_heat: f64,
    pub gradient_norm: f64,
    pub interior: TemperatureField,
    pub interior_max_principle_defect: f64,
    pub entries: Vec<ConvergenceEntry>,
    pub l2_decreasing: bool,
    pub dz_decreasing: bool,
}

impl ConvergenceStudy {
    pub fn passed(&self) -> bool {
        self.l2_decreasing && self.dz_decreasing
    }

    /// Largest excursion outside the surface range over every solve.
    pub fn max_principle_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_principle_defect)
            .fold(self.interior_max_principle_defect, f64::max)
    }
}

/// Solves the full temperature problem for each `ε` and compares it to `θ^app`.
pub fn convergence_study(setup: &ThermoclineSetup, epsilons: &[f64]) -> Result<ConvergenceStudy> {
    setup.validate()?;
    if epsilons.len() < 3 {
        return Err(Error::parameter(
            "epsilons",
            "a convergence study needs at least three values",
        ));
    }
    if !strictly_decreasing(epsilons) {
        return Err(Error::parameter(
            "epsilons",
            "values must be strictly decreasing",
        ));
    }
    let interior_flow = setup.interior_flow()?;
    let gradient_norm = check_gradient_bound(&interior_flow, &setup.grid, setup.lambda_heat)?;
    let interior = solve_interior_temperature(
        &interior_flow,
        &setup.surface,
        setup.lambda_heat,
        &setup.grid,
        &setup.solver,
    )?;
    let mut entries = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let flow = setup.flow(eps)?;
        let approx = approximate_temperature(&interior, flow.layer(), &setup.surface)?;
        let full = solve_full_temperature(
            &flow,
            &setup.surface,
            setup.lambda_heat,
            Some(&interior),
            &setup.solver,
        )?;
        let (l2_error, dz_error) = error_norms(&full.theta.sub(&approx));
        entries.push(ConvergenceEntry {
            epsilon: eps,
            l2_error,
            dz_error,
            iterations: full.iterations,
            residual: full.residual,
            max_principle_defect: full.max_principle_defect(),
        });
    }
    let l2: Vec<f64> = entries.iter().map(|e| e.l2_error).collect();
    let dz: Vec<f64> = entries.iter().map(|e| e.dz_error).collect();
    Ok(ConvergenceStudy {
        lambda_heat: setup.lambda_heat,
        gradient_norm,
        interior_max_principle_defect: interior.max_principle_defect(),
        interior,
        entries,
        l2_decreasing: strictly_decreasing(&l2),
        dz_decreasing: strictly_decreasing(&dz),
    })
}

/// Discrete advection-diffusion problem coupled column by column.
struct ColumnSystem<'a> {
    grid: Grid,
    lambda: f64,
    kappa: f64,
    velocity: &'a [[f64; 3]],
    surface: Field,
}

/// Coefficients of one nodal equation
/// `diag θ + sub θ_{k−1} + sup θ_{k+1} = Σ neighbour · θ_neighbour`.
struct Stencil {
    diag: f64,
    sub: f64,
    sup: f64,
    /// West, east, south, north.
    neighbours: [f64; 4],
}

impl<'a> ColumnSystem<'a> {
    fn new(grid: Grid, lambda: f64, kappa: f64, velocity: &'a [[f64; 3]], surface: Field) -> Self {
        Self {
            grid,
            lambda,
            kappa,
            velocity,
            surface,
        }
    }

    fn stencil(&self, i: usize, j: usize, k: usize) -> Stencil {
        let g = &self.grid;
        let (dx, dy, dz) = (g.dx(), g.dy(), g.dz());
        let [u1, u2, u3] = self.velocity[(i * g.ny() + j) * g.nz() + k];
        let (kx, ky) = (self.kappa / (dx * dx), self.kappa / (dy * dy));
        let mut neighbours = [
            kx + u1.max(0.0) / dx,
            kx + (-u1).max(0.0) / dx,
            ky + u2.max(0.0) / dy,
            ky + (-u2).max(0.0) / dy,
        ];
        if j == 0 {
            neighbours[2] = 0.0;
        }
        if j + 1 == g.ny() {
            neighbours[3] = 0.0;
        }
        let vertical = self.lambda / (dz * dz);
        let (sub, sup) = if k == 0 {
            (0.0, -2.0 * vertical)
        } else {
            (-vertical - u3 / (2.0 * dz), -vertical + u3 / (2.0 * dz))
        };
        Stencil {
            diag: 2.0 * vertical + neighbours.iter().sum::<f64>(),
            sub,
            sup,
            neighbours,
        }
    }

    fn neighbour_lines(&self, i: usize) -> [usize; 2] {
        let nx = self.grid.nx();
        [(i + nx - 1) % nx, (i + 1) % nx]
    }

    fn initial(&self, start: Option<&[f64]>) -> Vec<f64> {
        let g = &self.grid;
        let nz = g.nz();
        match start {
            Some(s) => s.to_vec(),
            None => (0..g.nx() * g.ny() * nz)
                .map(|n| self.surface.data()[n / nz])
                .collect(),
        }
    }

    /// Relaxes every column of line `i`; `line` is that line's data and
    /// `others` supplies the neighbouring lines.
    fn relax_line(
        &self,
        i: usize,
        line: &mut [f64],
        others: &[f64],
        forward: bool,
        relaxation: f64,
    ) {
        let g = &self.grid;
        let (ny, nz) = (g.ny(), g.nz());
        let block = ny * nz;
        let [west, east] = self.neighbour_lines(i);
        let m = nz - 1;
        let (mut sub, mut diag, mut sup, mut rhs) =
            (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let order: Box<dyn Iterator<Item = usize>> = if forward {
            Box::new(0..ny)
        } else {
            Box::new((0..ny).rev())
        };
        for j in order {
            for k in 0..m {
                let s = self.stencil(i, j, k);
                let at = |j: usize| j * nz + k;
                let south = if j > 0 { line[at(j - 1)] } else { 0.0 };
                let north = if j + 1 < ny { line[at(j + 1)] } else { 0.0 };
                rhs[k] = s.neighbours[0] * others[west * block + at(j)]
                    + s.neighbours[1] * others[east * block + at(j)]
                    + s.neighbours[2] * south
                    + s.neighbours[3] * north;
                sub[k] = s.sub;
                diag[k] = s.diag;
                sup[k] = s.sup;
            }
            rhs[m - 1] -= sup[m - 1] * line[j * nz + m];
            let solved = solve_tridiagonal(&sub, &diag, &sup, &rhs);
            for (k, v) in solved.into_iter().enumerate() {
                let old = line[j * nz + k];
                line[j * nz + k] = old + relaxation * (v - old);
            }
        }
    }

    fn sweep(&self, data: &mut [f64], forward: bool, relaxation: f64) {
        let block = self.grid.ny() * self.grid.nz();
        for colour in 0..2 {
            let snapshot = data.to_vec();
            data.par_chunks_mut(block)
                .enumerate()
                .filter(|(i, _)| i % 2 == colour)
                .for_each(|(i, line)| self.relax_line(i, line, &snapshot, forward, relaxation));
        }
    }

    /// Largest nodal residual over the unknown nodes.
    fn residual(&self, data: &[f64]) -> f64 {
        let g = &self.grid;
        let (ny, nz) = (g.ny(), g.nz());
        (0..g.nx() * ny)
            .into_par_iter()
            .map(|n| {
                let (i, j) = (n / ny, n % ny);
                let [west, east] = self.neighbour_lines(i);
                let node = |i: usize, j: usize, k: usize| data[(i * ny + j) * nz + k];
                (0..nz - 1)
                    .map(|k| {
                        let s = self.stencil(i, j, k);
                        let mut r = s.diag * node(i, j, k) + s.sup * node(i, j, k + 1);
                        if k > 0 {
                            r += s.sub * node(i, j, k - 1);
                        }
                        r -=
                            s.neighbours[0] * node(west, j, k) + s.neighbours[1] * node(east, j, k);
                        if j > 0 {
                            r -= s.neighbours[2] * node(i, j - 1, k);
                        }
                        if j + 1 < ny {
                            r -= s.neighbours[3] * node(i, j + 1, k);
                        }
                        r.abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    fn solve(self, start: Option<&[f64]>, options: &SolverOptions) -> Result<TemperatureField> {
        options.validate()?;
        let g = self.grid;
        let nz = g.nz();
        let mut data = self.initial(start);
        for (n, column) in data.chunks_mut(nz).enumerate() {
            column[nz - 1] = self.surface.data()[n];
        }
        let mut residual = self.residual(&data);
        let mut iterations = 0;
        while residual >= options.tolerance {
            if iterations == options.max_iterations {
                return Err(Error::Numerical(format!(
                    "temperature iteration stalled at residual {residual:.3e} after {iterations} sweeps"
                )));
            }
            self.sweep(&mut data, iterations % 2 == 0, options.relaxation);
            iterations += 1;
            residual = self.residual(&data);
            if !residual.is_finite() {
                return Err(Error::Numerical("temperature iteration diverged".into()));
            }
        }
        Ok(TemperatureField {
            theta: Field::from_vec(g, 1, nz, data)?,
            surface: self.surface,
            lambda_heat: self.lambda,
            iterations,
            residual,
        })
    }
}

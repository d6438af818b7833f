//! Ray transport of Poincaré-wave energy along the bicharacteristics of the
//! principal symbols `h±`, with viscous damping weights.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};
use crate::numerics::fit_power_law;

/// Default bound on `|h − h₀| / |h₀|` along a trajectory.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plus,
    Minus,
}

impl Mode {
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

fn vertical_wavenumber(k3: i32) -> Result<f64> {
    if k3 == 0 {
        return Err(Error::parameter(
            "k3",
            "the vertical wavenumber must be nonzero",
        ));
    }
    Ok(k3 as f64)
}

/// `h± = ±|k₃βy| / √(k₃² + ξ²)`.
pub fn hamiltonian(mode: Mode, y: f64, xi: f64, k3: i32, beta: f64) -> Result<f64> {
    let k3 = vertical_wavenumber(k3)?;
    Ok(mode.sign() * (k3 * beta * y).abs() / (k3 * k3 + xi * xi).sqrt())
}

/// `P(0, y, ξ, τ) = k₃²(βy)² − (k₃² + ξ²)τ²`.
pub fn dispersion_poly(y: f64, xi: f64, tau: f64, k3: i32, beta: f64) -> f64 {
    let k3 = k3 as f64;
    k3 * k3 * (beta * y).powi(2) - (k3 * k3 + xi * xi) * tau * tau
}

/// Point on a bicharacteristic together with the accumulated `∫Ξ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayState {
    pub time: f64,
    pub y: f64,
    pub xi: f64,
    pub mode: Mode,
    pub k3: i32,
    /// Zonal wavenumber; carried along, it does not enter the principal symbol.
    pub k: i32,
    pub beta: f64,
    pub h0: f64,
    pub damping_integral: f64,
}

impl RayState {
    /// Starts a ray at `(y₀, ξ₀)`; rays on the zero level set are rejected.
    pub fn new(mode: Mode, y0: f64, xi0: f64, k3: i32, k: i32, beta: f64) -> Result<Self> {
        let h0 = hamiltonian(mode, y0, xi0, k3, beta)?;
        if h0 == 0.0 {
            return Err(Error::hypothesis(
                Hypothesis::NondegenerateRay,
                format!("h = 0 at (y, ξ) = ({y0}, {xi0}); the ray sits on the equator"),
            ));
        }
        Ok(Self {
            time: 0.0,
            y: y0,
            xi: xi0,
            mode,
            k3,
            k,
            beta,
            h0,
            damping_integral: 0.0,
        })
    }

    pub fn energy(&self) -> f64 {
        self.mode.sign() * (self.k3 as f64 * self.beta * self.y).abs()
            / ((self.k3 as f64).powi(2) + self.xi * self.xi).sqrt()
    }

    pub fn drift(&self) -> f64 {
        ((self.energy() - self.h0) / self.h0).abs()
    }
}

/// `(dY/dt, dΞ/dt) = (∂_ξ h, −∂_y h)`.
pub fn ray_rhs(state: &RayState) -> Result<[f64; 2]> {
    if state.y == 0.0 && state.h0 == 0.0 {
        return Err(Error::hypothesis(
            Hypothesis::NondegenerateRay,
            "ray on the zero level set at y = 0",
        ));
    }
    let k3 = vertical_wavenumber(state.k3)?;
    Ok(rhs(state.mode.sign(), k3, state.beta, state.y, state.xi))
}

fn rhs(m: f64, k3: f64, beta: f64, y: f64, xi: f64) -> [f64; 2] {
    let q = k3 * k3 + xi * xi;
    let dy = -m * (k3 * beta * y).abs() * xi / (q * q.sqrt());
    let dxi = -m * (k3 * beta).abs() * sign(y) / q.sqrt();
    [dy, dxi]
}

fn sign(y: f64) -> f64 {
    if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn rk4_step(s: &RayState, dt: f64) -> RayState {
    let m = s.mode.sign();
    let k3 = s.k3 as f64;
    let f = |y: f64, xi: f64| {
        let [a, b] = rhs(m, k3, s.beta, y, xi);
        [a, b, xi * xi]
    };
    let k1 = f(s.y, s.xi);
    let k2 = f(s.y + 0.5 * dt * k1[0], s.xi + 0.5 * dt * k1[1]);
    let k3v = f(s.y + 0.5 * dt * k2[0], s.xi + 0.5 * dt * k2[1]);
    let k4 = f(s.y + dt * k3v[0], s.xi + dt * k3v[1]);
    let inc = |c: usize| dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3v[c] + k4[c]);
    RayState {
        time: s.time + dt,
        y: s.y + inc(0),
        xi: s.xi + inc(1),
        damping_integral: s.damping_integral + inc(2),
        ..*s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RayOptions {
    pub dt: f64,
    /// Keep every `stride`-th step; the final state is always kept.
    pub stride: usize,
    pub drift_tolerance: f64,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            stride: 1,
            drift_tolerance: DRIFT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayTrajectory {
    pub states: Vec<RayState>,
    /// Largest relative Hamiltonian drift over every step, sampled or not.
    pub max_drift: f64,
}

impl RayTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &RayState {
        self.states
            .last()
            .expect("a trajectory holds at least its initial state")
    }
}

fn integrate(
    state0: &RayState,
    duration: f64,
    options: &RayOptions,
    direction: f64,
) -> Result<RayTrajectory> {
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(Error::parameter(
            "dt",
            format!("must be positive, got {}", options.dt),
        ));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::parameter(
            "t_end",
            format!("must be non-negative, got {duration}"),
        ));
    }
    ray_rhs(state0)?;
    let stride = options.stride.max(1);
    let steps = (duration / options.dt).round() as usize;
    let dt = if steps > 0 {
        direction * duration / steps as f64
    } else {
        0.0
    };
    let mut s = *state0;
    let mut states = vec![s];
    let mut max_drift = s.drift();
    for n in 1..=steps {
        s = rk4_step(&s, dt);
        let drift = s.drift();
        max_drift = max_drift.max(drift);
        if !(drift <= options.drift_tolerance) {
            return Err(Error::Numerical(format!(
                "Hamiltonian drift {drift:.3e} exceeds {:.1e} at t = {:.6} (y = {}, ξ = {}, dt = {dt})",
                options.drift_tolerance, s.time, s.y, s.xi
            )));
        }
        if n % stride == 0 || n == steps {
            states.push(s);
        }
    }
    Ok(RayTrajectory { states, max_drift })
}

/// Classical fourth-order Runge–Kutta integration over `[t₀, t₀ + duration]`,
/// accumulating `∫Ξ²` with the same stages.
pub fn integrate_ray(
    state0: &RayState,
    duration: f64,
    options: &RayOptions,
) -> Result<RayTrajectory> {
    integrate(state0, duration, options, 1.0)
}

/// Integrates the same flow backwards in time.
pub fn integrate_ray_backward(
    state0: &RayState,
    duration: f64,
    options: &RayOptions,
) -> Result<RayTrajectory> {
    integrate(state0, duration, options, -1.0)
}

/// Exit and growth diagnostics of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeRecord {
    /// First sampled time with `Y` outside `[y_min, y_max]`.
    pub exit_time: Option<f64>,
    /// Last sampled time; a lower bound on the exit time when none was seen.
    pub observed_until: f64,
    /// Slope of `log|Ξ|` against `log t` over the fit window.
    pub growth_exponent: Option<f64>,
    /// `|Ξ(T)| / √(2β|k₃|T)` at the final sample.
    pub sqrt_law_ratio: f64,
    /// Smallest `|Y|` seen, to compare with the level-line floor `|h₀|/β`.
    pub min_abs_y: f64,
    pub level_line_floor: f64,
    pub xi_monotone: bool,
    pub y_sign_constant: bool,
}

pub fn escape_diagnostics(
    traj: &RayTrajectory,
    y_range: (f64, f64),
    fit_window: (f64, f64),
) -> EscapeRecord {
    let states = &traj.states;
    let first = states[0];
    let last = traj.last();
    let exit_time = states
        .iter()
        .find(|s| s.y < y_range.0 || s.y > y_range.1)
        .map(|s| s.time);
    let window: Vec<&RayState> = states
        .iter()
        .filter(|s| s.time >= fit_window.0 && s.time <= fit_window.1 && s.time > 0.0)
        .collect();
    let times: Vec<f64> = window.iter().map(|s| s.time).collect();
    let xis: Vec<f64> = window.iter().map(|s| s.xi.abs()).collect();
    let growth_exponent = if window.len() >= 3 {
        fit_power_law(&times, &xis).map(|f| f.slope)
    } else {
        None
    };
    let k3 = (first.k3 as f64).abs();
    let t = last.time - first.time;
    let sqrt_law_ratio = if t > 0.0 {
        last.xi.abs() / (2.0 * first.beta.abs() * k3 * t).sqrt()
    } else {
        f64::NAN
    };
    let steps: Vec<f64> = states.windows(2).map(|w| w[1].xi - w[0].xi).collect();
    let xi_monotone = steps.iter().all(|d| *d > 0.0) || steps.iter().all(|d| *d < 0.0);
    EscapeRecord {
        exit_time,
        observed_until: last.time,
        growth_exponent,
        sqrt_law_ratio,
        min_abs_y: states.iter().fold(f64::INFINITY, |m, s| m.min(s.y.abs())),
        level_line_floor: first.h0.abs() / first.beta.abs(),
        xi_monotone,
        y_sign_constant: states.iter().all(|s| sign(s.y) == sign(first.y)),
    }
}

/// `exp(−4(ν_h/ε²)∫₀ᵗ Ξ²)` at every sample.
pub fn damping_weight(traj: &RayTrajectory, nu_h: f64, epsilon: f64) -> Vec<f64> {
    let rate = 4.0 * nu_h / (epsilon * epsilon);
    let start = traj.states[0].damping_integral;
    traj.states
        .iter()
        .map(|s| (-rate * (s.damping_integral - start)).exp())
        .collect()
}

/// Comparison weight using the endpoint value, `exp(−4(ν_h/ε²)Ξ(t)²t)`.
pub fn endpoint_weight(traj: &RayTrajectory, nu_h: f64, epsilon: f64) -> Vec<f64> {
    let rate = 4.0 * nu_h / (epsilon * epsilon);
    let t0 = traj.states[0].time;
    traj.states
        .iter()
        .map(|s| (-rate * s.xi * s.xi * (s.time - t0)).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ν_h ≪ ε²`: energy follows the bicharacteristics.
    Propagative,
    /// `ν_h ≫ ε²`: energy is dissipated before it moves.
    Dissipative,
    /// `ν_h ~ ε²`: transport and damping at the same rate.
    Mixed,
}

/// Classifies `ν_h/ε²` against `margin` and `1/margin`.
pub fn regime(nu_h: f64, epsilon: f64, margin: f64) -> Result<Regime> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::parameter(
            "margin",
            format!("must lie in (0, 1), got {margin}"),
        ));
    }
    let ratio = nu_h / (epsilon * epsilon);
    Ok(if ratio <= margin {
        Regime::Propagative
    } else if ratio >= 1.0 / margin {
        Regime::Dissipative
    } else {
        Regime::Mixed
    })
}

/// `|k₃| sgn(y) / √(k₃² + ξ²)`.
fn polarization_factor(y: f64, xi: f64, k3: i32) -> Result<f64> {
    let k3 = vertical_wavenumber(k3)?;
    if y == 0.0 {
        return Err(Error::hypothesis(
            Hypothesis::EquatorialSupport,
            "polarization is singular at y = 0",
        ));
    }
    Ok(k3.abs() * sign(y) / (k3 * k3 + xi * xi).sqrt())
}

/// Leading-order amplitudes `(μ⁺, μ⁻)` of a horizontal velocity mode, from
/// the inverse of the symbol matrix with columns `(∓i/s, 1)`, `s = |k₃| sgn(y)/√(k₃²+ξ²)`.
pub fn polarization_leading(u: [Complex64; 2], y: f64, xi: f64, k3: i32) -> Result<[Complex64; 2]> {
    let s = polarization_factor(y, xi, k3)?;
    let rotated = Complex64::i() * s * u[0];
    Ok([0.5 * (u[1] + rotated), 0.5 * (u[1] - rotated)])
}

/// `μ⁺ Q⁺ + μ⁻ Q⁻` with the same leading-order columns.
pub fn polarization_reconstruct(
    mu: [Complex64; 2],
    y: f64,
    xi: f64,
    k3: i32,
) -> Result<[Complex64; 2]> {
    let s = polarization_factor(y, xi, k3)?;
    Ok([-Complex64::i() / s * (mu[0] - mu[1]), mu[0] + mu[1]])
}

/// Polarizes a latitude profile, refusing data that does not vanish within
/// `exclusion` of the equator.
pub fn polarize_profile(
    u: &[[Complex64; 2]],
    latitudes: &[f64],
    k3: i32,
    exclusion: f64,
) -> Result<Vec<[Complex64; 2]>> {
    u.iter()
        .zip(latitudes)
        .map(|(v, &y)| {
            if y.abs() < exclusion {
                if v[0].norm() + v[1].norm() > 0.0 {
                    return Err(Error::hypothesis(
                        Hypothesis::EquatorialSupport,
                        format!(
                            "data is nonzero at y = {y}, inside the exclusion band {exclusion}"
                        ),
                    ));
                }
                return Ok([Complex64::new(0.0, 0.0); 2]);
            }
            polarization_leading(*v, y, 0.0, k3)
        })
        .collect()
}

/// Antiderivative `G(Ξ) = ½(Ξ√(k₃²+Ξ²) + k₃² asinh(Ξ/|k₃|))` of `√(k₃²+Ξ²)`;
/// along a ray `G(Ξ(t)) − G(Ξ₀) = −m|k₃β| sgn(Y) t`.
pub fn xi_potential(xi: f64, k3: i32) -> f64 {
    let k = (k3 as f64).abs();
    0.5 * (xi * (k * k + xi * xi).sqrt() + k * k * (xi / k).asinh())
}

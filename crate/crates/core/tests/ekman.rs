use std::f64::consts::TAU;

use betaplane::ekman::{ekman_pumping, pumping_jet, BoundaryLayerProfile};
use betaplane::model::{
    CoriolisProfile, Grid, Harmonic, LatitudeProfile, StressTerm, TruncatedCoriolis, WindStress,
};
use betaplane::numerics::fit_power_law;
use proptest::prelude::*;

fn mixed_stress() -> WindStress {
    WindStress {
        zonal: vec![StressTerm {
            amplitude: 0.7,
            latitude: LatitudeProfile::Power {
                power: 3,
                gaussian: 0.5,
            },
            zonal: Harmonic {
                m: 1,
                cos: 0.4,
                sin: 1.0,
            },
        }],
        meridional: vec![StressTerm {
            amplitude: 1.3,
            latitude: LatitudeProfile::Power {
                power: 2,
                gaussian: 1.0,
            },
            zonal: Harmonic {
                m: 2,
                cos: -0.5,
                sin: 0.8,
            },
        }],
    }
}

fn profile(epsilon: f64, delta: f64) -> BoundaryLayerProfile {
    let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), delta, 0.7).unwrap();
    BoundaryLayerProfile::new(mixed_stress(), tc, epsilon).unwrap()
}

fn latitude() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.02f64, 0.02..3.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surface_neumann_condition(x in 0.0..TAU, y in latitude(), eps in 0.02..0.5f64) {
        let p = profile(eps, 0.1);
        let col = p.column(x, y).unwrap();
        let s = p.stress().value(x, y);
        let h = 1e-3 / col.decay_rate().norm();
        let u0 = col.velocity_h(0.0);
        let u1 = col.velocity_h(h);
        let u2 = col.velocity_h(2.0 * h);
        for c in 0..2 {
            let fd = (-3.0 * u0[c] + 4.0 * u1[c] - u2[c]) / (2.0 * h);
            let scale = (s[0].hypot(s[1]) / eps).max(1e-300);
            prop_assert!((fd + s[c] / eps).abs() <= 1e-5 * scale);
        }
    }

    #[test]
    fn divergence_closure(x in 0.0..TAU, y in latitude(), zeta in 0.0..20.0f64, eps in 0.02..0.5f64) {
        let p = profile(eps, 0.1);
        let col = p.column(x, y).unwrap();
        let h = 1e-5 / col.decay_rate().norm();
        let z = zeta / col.decay_rate().re;
        let fd = (col.velocity_3(z + h) - col.velocity_3(z - h)) / (2.0 * h);
        let scale = col.div_h(z).abs().max(col.velocity_3(z).abs()).max(1e-300);
        prop_assert!((fd - eps * col.div_h(z)).abs() <= 1e-7 * scale * (1.0 + eps));
    }

    #[test]
    fn analytic_divergence_matches_finite_differences(x in 0.0..TAU, y in latitude(), zeta in 0.0..5.0f64) {
        let p = profile(0.1, 0.1);
        let h = 1e-5 * y.abs().min(1.0);
        let du = (p.velocity_h(x + h, y, zeta).unwrap()[0] - p.velocity_h(x - h, y, zeta).unwrap()[0]) / (2.0 * h);
        let dv = (p.velocity_h(x, y + h, zeta).unwrap()[1] - p.velocity_h(x, y - h, zeta).unwrap()[1]) / (2.0 * h);
        let exact = p.div_h(x, y, zeta).unwrap();
        let scale = p.velocity_h(x, y, zeta).unwrap().iter().map(|v| v.abs()).fold(exact.abs(), f64::max) / y.abs().min(1.0);
        prop_assert!((du + dv - exact).abs() <= 1e-6 * scale.max(1e-300));
    }

    #[test]
    fn pressure_identity(x in 0.0..TAU, y in latitude(), zeta in 0.0..10.0f64, eps in 0.02..0.5f64) {
        let p = profile(eps, 0.1);
        let col = p.column(x, y).unwrap();
        let h = 1e-5 / col.decay_rate().norm();
        let dz3 = (col.velocity_3(zeta + h) - col.velocity_3(zeta - h)) / (2.0 * h);
        let pr = col.pressure(zeta);
        prop_assert!((pr + eps * eps * dz3).abs() <= 1e-8 * (pr.abs() + eps.powi(3) * col.div_h(zeta).abs()).max(1e-300));
    }

    #[test]
    fn pumping_is_minus_surface_vertical_velocity(x in 0.0..TAU, y in latitude(), eps in 0.02..0.5f64) {
        let p = profile(eps, 0.1);
        let w = ekman_pumping(p.stress(), p.coriolis(), x, y).unwrap();
        let u3 = p.velocity_3(x, y, 0.0).unwrap();
        prop_assert!((w + u3).abs() <= 1e-10 * w.abs().max(1.0));
    }

    #[test]
    fn pumping_derivative(x in 0.0..TAU, y in latitude()) {
        let p = profile(0.1, 0.1);
        let h = 1e-5 * y.abs().min(1.0);
        let [w, dw] = pumping_jet(p.stress(), p.coriolis(), x, y).unwrap();
        let fd = (ekman_pumping(p.stress(), p.coriolis(), x, y + h).unwrap()
            - ekman_pumping(p.stress(), p.coriolis(), x, y - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - dw).abs() <= 1e-5 * (dw.abs() + w.abs() / y.abs().min(1.0)).max(1e-12));
    }

    #[test]
    fn exponential_decay(x in 0.0..TAU, y in latitude(), z1 in 0.0..10.0f64, gap in 0.0..10.0f64) {
        let p = profile(0.1, 0.1);
        let col = p.column(x, y).unwrap();
        let re = col.decay_rate().re;
        let norm = |z: f64| { let [u, v] = col.velocity_h(z); u.hypot(v) };
        prop_assert!(norm(z1 + gap) <= norm(z1) * (-re * gap).exp() * (1.0 + 1e-10) + 1e-300);
    }

    #[test]
    fn closed_form_matches_quadrature(x in 0.0..TAU, y in latitude(), eps in 0.01..1.0f64) {
        let n = profile(eps, 0.1).column_l2_norms(x, y).unwrap();
        prop_assert!((n.horizontal - n.horizontal_quadrature).abs() <= 1e-10 * n.horizontal.max(1e-300));
    }
}

#[test]
fn physical_field_is_the_rescaled_layer() {
    let eps = 0.05;
    let p = profile(eps, eps);
    let grid = Grid::new(8, 32, 2001, 3.0).unwrap();
    let field = p.sample_bl_field(&grid).unwrap();
    let wz = grid.z_weights();
    let mut physical = 0.0;
    let mut stretched = 0.0;
    for i in 0..grid.nx() {
        for j in 0..grid.ny() {
            for (k, w) in wz.iter().enumerate() {
                physical += w * (field.get(0, i, j, k).powi(2) + field.get(1, i, j, k).powi(2));
            }
            stretched += p
                .column(grid.x(i), grid.y(j))
                .unwrap()
                .horizontal_energy_to(1.0 / eps);
        }
    }
    let ratio = physical / (eps * stretched);
    assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
}

#[test]
fn zero_stress_gives_zero_field() {
    let tc = TruncatedCoriolis::exact(CoriolisProfile::linear(1.0));
    let p = BoundaryLayerProfile::new(WindStress::zero(), tc, 0.1).unwrap();
    let field = p
        .sample_bl_field(&Grid::new(4, 8, 5, 2.0).unwrap())
        .unwrap();
    assert_eq!(field.max_abs(), 0.0);
}

#[test]
fn layer_norm_scalings() {
    let sigma = WindStress::meridional_power(1.0, 2, 1.0, 1);
    let grid = Grid::new(8, 8192, 4, 4.0).unwrap();
    let eps = [0.1, 0.05, 0.025, 0.0125];
    let norms: Vec<_> = eps
        .iter()
        .map(|&e| {
            let tc = TruncatedCoriolis::new(CoriolisProfile::linear(1.0), e, 0.7).unwrap();
            BoundaryLayerProfile::new(sigma.clone(), tc, e)
                .unwrap()
                .layer_norms(&grid, false)
                .unwrap()
        })
        .collect();
    let slope = |f: &dyn Fn(usize) -> f64| {
        let v: Vec<f64> = (0..eps.len()).map(f).collect();
        fit_power_law(&eps, &v).unwrap().slope
    };
    assert!((slope(&|i| norms[i].horizontal) + 1.0).abs() < 0.1);
    assert!(slope(&|i| norms[i].vertical).abs() < 0.1);
    assert!((slope(&|i| norms[i].truncation) - 1.75).abs() < 0.1);
}

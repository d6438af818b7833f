use betaplane::ekman::BoundaryLayerProfile;
use betaplane::interior::InteriorFlow;
use betaplane::model::{CoriolisProfile, Grid, TruncatedCoriolis, WindStress};
use betaplane::numerics::fit_power_law;
use betaplane::thermocline::{
    approximate_temperature, bl_temperature, check_gradient_bound, convergence_study, error_norms,
    interior_energy_balance, lid_corrector, solve_interior_temperature, LayerTemperature,
    SolverOptions, SurfaceTemperature, ThermoclineSetup,
};
use betaplane::Hypothesis;
use proptest::prelude::*;

fn exact() -> TruncatedCoriolis {
    TruncatedCoriolis::exact(CoriolisProfile::linear(1.0))
}

fn quartic(amplitude: f64) -> WindStress {
    WindStress::meridional_power(amplitude, 4, 1.0, 1)
}

fn gaussian() -> SurfaceTemperature {
    SurfaceTemperature::Gaussian {
        offset: 0.0,
        amplitude: 1.0,
        gaussian: 1.0,
    }
}

fn grid(ny: usize, nz: usize) -> Grid {
    Grid::new(16, ny, nz, 4.0).unwrap()
}

fn setup(stress: WindStress, grid: Grid) -> ThermoclineSetup {
    ThermoclineSetup {
        coriolis: CoriolisProfile::linear(1.0),
        stress,
        surface: gaussian(),
        lambda_heat: 1.0,
        grid,
        vanishing_order: 4,
        solver: SolverOptions::default(),
        assembly: Default::default(),
    }
}

#[test]
fn still_interior_extends_the_surface_data() {
    let g = grid(32, 41);
    let flow = InteriorFlow::new(&WindStress::zero(), exact()).unwrap();
    let t =
        solve_interior_temperature(&flow, &gaussian(), 1.0, &g, &SolverOptions::default()).unwrap();
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let top = gaussian().value(g.x(i), g.y(j));
            for k in 0..g.nz() {
                assert!((t.value(i, j, k) - top).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn constant_surface_data_is_an_exact_solution() {
    let g = grid(32, 41);
    let flow = InteriorFlow::new(&quartic(0.1), exact()).unwrap();
    let surface = SurfaceTemperature::Constant { value: 2.5 };
    let t =
        solve_interior_temperature(&flow, &surface, 1.0, &g, &SolverOptions::default()).unwrap();
    assert!(t.theta().data().iter().all(|v| (v - 2.5).abs() < 1e-12));
}

#[test]
fn interior_solution_meets_boundary_conditions_and_maximum_principle() {
    let g = grid(64, 101);
    let flow = InteriorFlow::new(&quartic(0.1), exact()).unwrap();
    let t =
        solve_interior_temperature(&flow, &gaussian(), 1.0, &g, &SolverOptions::default()).unwrap();
    assert!(t.residual < 1e-8);
    assert!(t.iterations > 0);
    let [top, bottom] = t.boundary_defects();
    assert!(top < 1e-14, "top {top}");
    assert!(bottom < 1e-2, "bottom {bottom}");
    assert!(t.max_principle_defect() < 1e-8);
}

#[test]
fn interior_energy_identity_holds_to_discretization_error() {
    let flow = InteriorFlow::new(&quartic(0.1), exact()).unwrap();
    let gap = |g: Grid| {
        let t = solve_interior_temperature(&flow, &gaussian(), 1.0, &g, &SolverOptions::default())
            .unwrap();
        let [lhs, rhs] = interior_energy_balance(&t, &flow, &gaussian()).unwrap();
        assert!(lhs > 0.0);
        ((lhs - rhs) / lhs).abs()
    };
    let coarse = gap(Grid::new(16, 64, 101, 4.0).unwrap());
    let fine = gap(Grid::new(32, 128, 201, 4.0).unwrap());
    assert!(coarse < 0.05, "coarse {coarse}");
    assert!(fine < coarse, "coarse {coarse}, fine {fine}");
}

#[test]
fn gradient_bound_refuses_strong_interior_flow() {
    let g = grid(64, 41);
    let strong = InteriorFlow::new(&quartic(1.0), exact()).unwrap();
    let err = check_gradient_bound(&strong, &g, 1.0).unwrap_err();
    assert_eq!(
        err.violated_hypothesis(),
        Some(Hypothesis::AdvectionGradientBound)
    );
    let err = solve_interior_temperature(&strong, &gaussian(), 1.0, &g, &SolverOptions::default())
        .unwrap_err();
    assert_eq!(
        err.violated_hypothesis(),
        Some(Hypothesis::AdvectionGradientBound)
    );
    let weak = InteriorFlow::new(&quartic(0.1), exact()).unwrap();
    assert!(check_gradient_bound(&weak, &g, 1.0).unwrap() <= 0.25);
}

#[test]
fn layer_temperature_vanishes_without_stress_or_gradient() {
    let still = BoundaryLayerProfile::new(WindStress::zero(), exact(), 0.05).unwrap();
    assert_eq!(
        bl_temperature(&still, &gaussian(), 1.0, 0.3, 0.8, 0.5).unwrap(),
        0.0
    );
    let layer = BoundaryLayerProfile::new(quartic(1.0), exact(), 0.05).unwrap();
    let flat = SurfaceTemperature::Constant { value: 3.0 };
    assert_eq!(
        bl_temperature(&layer, &flat, 1.0, 0.3, 0.8, 0.5).unwrap(),
        0.0
    );
    assert!(bl_temperature(&layer, &gaussian(), 1.0, 0.3, 0.0, 0.5).is_err());
}

#[test]
fn layer_temperature_decays_with_depth() {
    let layer = BoundaryLayerProfile::new(quartic(1.0), exact(), 0.05).unwrap();
    let near = bl_temperature(&layer, &gaussian(), 1.0, 0.3, 1.2, 0.0)
        .unwrap()
        .abs();
    let far = bl_temperature(&layer, &gaussian(), 1.0, 0.3, 1.2, 60.0)
        .unwrap()
        .abs();
    assert!(near > 1e-3);
    assert!(far < 1e-12 * near.max(1.0));
}

#[test]
fn assembly_identities_hold_exactly() {
    let layer = BoundaryLayerProfile::new(quartic(1.0), exact(), 0.05).unwrap();
    let col = layer.column(1.1, -1.4).unwrap();
    let bl = LayerTemperature::new(&col, gaussian().gradient(1.1, -1.4), 1.0);
    let eps = 0.05;
    assert!(bl.correction(eps, 1.0).abs() < 1e-15);
    assert!((eps * lid_corrector(&bl, eps, 1.0) + eps * bl.value(0.0)).abs() < 1e-15);
    let dz_bottom = -bl.dzeta(1.0 / eps) + eps * bl.dzeta(1.0 / eps) / eps;
    assert_eq!(dz_bottom, 0.0);
    let h = 1e-5;
    let fd = (bl.correction(eps, h) - bl.correction(eps, 0.0)) / h;
    assert!(fd.abs() < 1e-9, "fd {fd}");
}

#[test]
fn approximate_temperature_matches_surface_data() {
    let g = grid(32, 81);
    let flow = InteriorFlow::new(&quartic(0.1), exact()).unwrap();
    let interior =
        solve_interior_temperature(&flow, &gaussian(), 1.0, &g, &SolverOptions::default()).unwrap();
    let layer = BoundaryLayerProfile::new(quartic(0.1), exact(), 0.05).unwrap();
    let approx = approximate_temperature(&interior, &layer, &gaussian()).unwrap();
    let top = g.nz() - 1;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            assert!((approx.get(0, i, j, top) - gaussian().value(g.x(i), g.y(j))).abs() < 1e-14);
        }
    }
}

#[test]
fn layer_temperature_is_linear() {
    let eps = 0.05;
    let s1 = quartic(0.7);
    let s2 = WindStress::meridional_power(-0.4, 5, 0.5, 2);
    let sum = BoundaryLayerProfile::new(s1.plus(&s2), exact(), eps).unwrap();
    let a = BoundaryLayerProfile::new(s1, exact(), eps).unwrap();
    let b = BoundaryLayerProfile::new(s2, exact(), eps).unwrap();
    let (x, y, zeta) = (2.1, 0.9, 0.7);
    let g1 = [0.3, -1.1];
    let g2 = [-0.8, 0.4];
    let at = |p: &BoundaryLayerProfile, g: [f64; 2]| {
        LayerTemperature::new(&p.column(x, y).unwrap(), g, 1.3).value(zeta)
    };
    let by_stress = at(&sum, g1) - at(&a, g1) - at(&b, g1);
    let by_gradient =
        at(&a, [g1[0] + 2.0 * g2[0], g1[1] + 2.0 * g2[1]]) - at(&a, g1) - 2.0 * at(&a, g2);
    assert!(by_stress.abs() < 1e-12, "{by_stress}");
    assert!(by_gradient.abs() < 1e-12, "{by_gradient}");
}

#[test]
fn still_ocean_with_uniform_surface_gives_zero_error() {
    let mut s = setup(WindStress::zero(), grid(32, 81));
    s.surface = SurfaceTemperature::Constant { value: 1.5 };
    let study = convergence_study(&s, &[0.1, 0.05, 0.025]).unwrap();
    for e in &study.entries {
        assert!(e.l2_error < 1e-8 && e.dz_error < 1e-8, "{e:?}");
    }
}

#[test]
fn still_ocean_error_is_horizontal_diffusion_only() {
    let study = convergence_study(
        &setup(WindStress::zero(), grid(64, 81)),
        &[0.1, 0.05, 0.025],
    )
    .unwrap();
    assert!(study
        .interior
        .theta()
        .data()
        .chunks(81)
        .enumerate()
        .all(|(n, c)| {
            let top = study.interior.surface().data()[n];
            c.iter().all(|v| (v - top).abs() < 1e-12)
        }));
    let eps: Vec<f64> = study.entries.iter().map(|e| e.epsilon).collect();
    let l2: Vec<f64> = study.entries.iter().map(|e| e.l2_error).collect();
    let fit = fit_power_law(&eps, &l2).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.1, "slope {}", fit.slope);
}

#[test]
fn error_decays_with_the_rossby_number() {
    let study =
        convergence_study(&setup(quartic(0.1), grid(128, 401)), &[0.1, 0.05, 0.025]).unwrap();
    assert!(study.passed(), "{:?}", study.entries);
    assert!(study.max_principle_defect() < 1e-8);
    assert!(study.gradient_norm <= 0.25);
}

#[test]
fn errors_are_discretization_converged() {
    let coarse =
        convergence_study(&setup(quartic(0.1), grid(64, 201)), &[0.1, 0.05, 0.025]).unwrap();
    let fine =
        convergence_study(&setup(quartic(0.1), grid(128, 401)), &[0.1, 0.05, 0.025]).unwrap();
    for (c, f) in coarse.entries.iter().zip(&fine.entries) {
        assert!(
            ((c.total() - f.total()) / f.total()).abs() < 0.05,
            "{c:?} {f:?}"
        );
    }
}

#[test]
fn study_requires_enough_vanishing() {
    let err = convergence_study(
        &setup(WindStress::meridional_power(0.1, 2, 1.0, 1), grid(32, 41)),
        &[0.1, 0.05, 0.025],
    )
    .unwrap_err();
    assert_eq!(
        err.violated_hypothesis(),
        Some(Hypothesis::StressVanishingOrder)
    );
    assert!(convergence_study(&setup(quartic(0.1), grid(32, 41)), &[0.1, 0.05]).is_err());
}

#[test]
fn error_norms_of_linear_profile() {
    let g = grid(8, 11);
    let mut f = betaplane::model::Field::zeros_volume(g, 1);
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            for k in 0..g.nz() {
                f.set(0, i, j, k, 2.0 * g.z(k));
            }
        }
    }
    let (_, dz) = error_norms(&f);
    let volume = std::f64::consts::TAU * 8.0;
    assert!((dz - 2.0 * volume.sqrt()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layer_temperature_solves_its_equation(
        x in 0.0f64..std::f64::consts::TAU,
        y in prop_oneof![-3.5f64..-0.05, 0.05f64..3.5],
        zeta in 0.0f64..20.0,
        eps in 0.01f64..0.2,
        lambda in 0.2f64..3.0,
    ) {
        let layer = BoundaryLayerProfile::new(quartic(1.0), exact(), eps).unwrap();
        let col = layer.column(x, y).unwrap();
        let g = gaussian().gradient(x, y);
        let bl = LayerTemperature::new(&col, g, lambda);
        let u = col.velocity_h(zeta);
        let r = -lambda * bl.dzeta2(zeta) + eps * (u[0] * g[0] + u[1] * g[1]);
        prop_assert!(r.abs() < 1e-10, "residual {}", r);
    }
}

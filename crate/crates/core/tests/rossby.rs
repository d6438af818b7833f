use betaplane::model::{Field, Grid};
use betaplane::residual::edge_ratio;
use betaplane::rossby::{
    decompose, rossby_frequency, Region, RossbyParameters, SpectralState, WavePacket,
    DIVERGENCE_TOLERANCE,
};
use betaplane::Hypothesis;
use num_complex::Complex64;
use proptest::prelude::*;

const INVISCID: RossbyParameters = RossbyParameters {
    epsilon: 0.1,
    beta: 1.0,
    nu_h: 0.0,
};

fn grid() -> Grid {
    Grid::new(32, 64, 4, 4.0).unwrap()
}

fn blob(grid: Grid) -> Field {
    Field::horizontal_from_fn(grid, |x, y| {
        [((x - 2.0).cos() * 2.0 - 2.0 - y * y).exp() * (1.0 + 0.3 * (2.0 * x).sin())]
    })
}

fn relative_gap(a: &SpectralState, b: &SpectralState) -> f64 {
    let mut gap = 0.0f64;
    let mut scale = 0.0f64;
    for c in 0..2 {
        for (x, y) in a.coefficients()[c].iter().zip(&b.coefficients()[c]) {
            gap = gap.max((x - y).norm());
            scale = scale.max(x.norm());
        }
    }
    gap / scale
}

#[test]
fn energy_is_conserved_without_viscosity() {
    let s = SpectralState::from_streamfunction(&blob(grid()), INVISCID).unwrap();
    let e0 = s.energy();
    for t in [0.5, 1.0, 2.5, 5.0, 10.0] {
        let e = s.propagate(t).unwrap().energy();
        assert!((e - e0).abs() < 1e-12 * e0, "{t}: {e} vs {e0}");
    }
}

#[test]
fn single_mode_turns_by_half_a_period() {
    let g = grid();
    let v = Field::horizontal_from_fn(g, |x, _| [0.0, x.cos()]);
    let s = SpectralState::from_velocity(&v, INVISCID, DIVERGENCE_TOLERANCE).unwrap();
    let later = s.propagate(std::f64::consts::PI / 10.0).unwrap();
    let n = g.ny();
    let ratio = later.coefficients()[1][n] / s.coefficients()[1][n];
    assert!(
        (ratio - Complex64::new(-1.0, 0.0)).norm() < 1e-10,
        "{ratio}"
    );
}

#[test]
fn propagation_is_a_semigroup() {
    let p = RossbyParameters {
        nu_h: 1e-3,
        ..INVISCID
    };
    let s = SpectralState::from_streamfunction(&blob(grid()), p).unwrap();
    let once = s.propagate(0.7).unwrap();
    let twice = s.propagate(0.3).unwrap().propagate(0.4).unwrap();
    assert!(relative_gap(&once, &twice) < 1e-12);
    assert!((twice.time() - 0.7).abs() < 1e-15);
    assert!(s.propagate(-1.0).is_err());
}

#[test]
fn zonal_modes_only_diffuse() {
    let g = grid();
    let ny = g.ny();
    let s = SpectralState::from_streamfunction(&blob(g), INVISCID).unwrap();
    let later = s.propagate(3.0).unwrap();
    for j in 0..ny {
        assert_eq!(later.coefficients()[0][j], s.coefficients()[0][j]);
    }
    let nu = 0.01;
    let viscous = SpectralState::from_streamfunction(
        &blob(g),
        RossbyParameters {
            nu_h: nu,
            ..INVISCID
        },
    )
    .unwrap();
    let later = viscous.propagate(2.0).unwrap();
    for j in 1..ny {
        let (_, xi) = viscous.wavevector(j);
        let expected = viscous.coefficients()[0][j] * (-nu * xi * xi * 2.0).exp();
        assert!((later.coefficients()[0][j] - expected).norm() <= 1e-14 * (1.0 + expected.norm()));
    }
}

#[test]
fn propagation_keeps_divergence_free() {
    let s = SpectralState::from_streamfunction(&blob(grid()), INVISCID).unwrap();
    assert!(s.divergence_defect() < 1e-14);
    assert!(s.propagate(1.3).unwrap().divergence_defect() < 1e-14);
}

#[test]
fn decomposition_splits_energy() {
    let g = grid();
    let s = SpectralState::from_streamfunction(&blob(g), INVISCID).unwrap();
    let v = s.velocity();
    let (zonal, rest) = decompose(&v, DIVERGENCE_TOLERANCE).unwrap();
    let sum = zonal.l2_norm().powi(2) + rest.l2_norm().powi(2);
    assert!((sum - v.l2_norm().powi(2)).abs() < 1e-12 * sum);
    assert!(v.sub(&zonal).sub(&rest).max_abs() == 0.0);

    let shear = Field::horizontal_from_fn(g, |_, y| [(-y * y).exp(), 0.0]);
    let (_, rest) = decompose(&shear, DIVERGENCE_TOLERANCE).unwrap();
    assert!(rest.max_abs() < 1e-15);
    let wave = Field::horizontal_from_fn(g, |x, _| [0.0, x.sin()]);
    let (zonal, _) = decompose(&wave, DIVERGENCE_TOLERANCE).unwrap();
    assert!(zonal.max_abs() < 1e-15);

    let source = Field::horizontal_from_fn(g, |x, y| [x.cos() * (-y * y).exp(), 0.0]);
    let err = decompose(&source, DIVERGENCE_TOLERANCE).unwrap_err();
    assert_eq!(err.violated_hypothesis(), Some(Hypothesis::DivergenceFree));
}

#[test]
fn vorticity_matches_laplacian_of_streamfunction() {
    let g = Grid::new(32, 128, 4, 8.0).unwrap();
    let psi = Field::horizontal_from_fn(g, |x, y| [(2.0 * (x - 3.0).cos() - 2.0 - y * y).exp()]);
    let s = SpectralState::from_streamfunction(&psi, INVISCID).unwrap();
    let zeta = s.vorticity();
    let mut worst = 0.0f64;
    let t = betaplane::numerics::fft::Transform2::new(32, 128);
    let mut hat: Vec<Complex64> = psi
        .component(0)
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    t.forward(&mut hat);
    for (n, h) in hat.iter().enumerate() {
        let (k, xi) = s.wavevector(n);
        let lap = -(k * k + xi * xi) * h;
        worst = worst.max((zeta.values()[n] - lap).norm());
    }
    let scale = zeta.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    assert!(worst < 1e-10 * scale);
}

#[test]
fn vorticity_path_agrees_with_velocity_path() {
    let p = RossbyParameters {
        nu_h: 1e-3,
        ..INVISCID
    };
    let s = SpectralState::from_streamfunction(&blob(grid()), p).unwrap();
    let (_, rest) = decompose(&s.velocity(), DIVERGENCE_TOLERANCE).unwrap();
    let s = SpectralState::from_velocity(&rest, p, DIVERGENCE_TOLERANCE).unwrap();
    let round = s.vorticity().velocity();
    assert!(relative_gap(&s, &round) < 1e-12);
    let direct = s.propagate(0.8).unwrap();
    let via = s.vorticity().propagate(0.8).unwrap().velocity();
    assert!(relative_gap(&direct, &via) < 1e-10);
}

#[test]
fn local_energy_limits() {
    let g = grid();
    let s = SpectralState::from_streamfunction(&blob(g), INVISCID).unwrap();
    let whole = s.local_energy(&Region::whole(&g)).unwrap();
    assert!((whole - s.energy()).abs() < 1e-12 * whole);
    let later = s
        .propagate(4.0)
        .unwrap()
        .local_energy(&Region::whole(&g))
        .unwrap();
    assert!((later - whole).abs() < 1e-12 * whole);
    let k = Region {
        x0: 1.0,
        x1: 3.0,
        y0: -1.0,
        y1: 1.0,
    };
    assert_eq!(
        s.local_energy(&k).unwrap(),
        s.propagate(0.0).unwrap().local_energy(&k).unwrap()
    );
    assert!(s
        .local_energy(&Region {
            x0: 1.0,
            x1: 9.0,
            y0: -1.0,
            y1: 1.0
        })
        .is_err());
}

#[derive(serde::Deserialize)]
struct Fixture {
    params: RossbyParameters,
    packet: WavePacket,
    reach: f64,
    time: f64,
    fraction: f64,
}

#[test]
fn packet_leaves_its_support_like_the_reference() {
    let fixture: Fixture =
        serde_json::from_str(include_str!("fixtures/rossby_packet.json")).unwrap();
    let g = Grid::new(128, 8192, 4, 128.0).unwrap();
    let s = SpectralState::from_streamfunction(&fixture.packet.streamfunction(g), fixture.params)
        .unwrap();
    let region = fixture.packet.support(fixture.reach, &g);
    let later = s.propagate(fixture.time).unwrap();
    let fraction = later.local_energy(&region).unwrap() / s.local_energy(&region).unwrap();
    assert!(edge_ratio(later.velocity().component(0), &g) < 1e-10);
    assert!(
        (fraction - fixture.fraction).abs() < 1e-4,
        "{fraction} vs {}",
        fixture.fraction
    );
    assert!(fraction < 0.1);
}

proptest! {
    #[test]
    fn frequency_is_odd_in_k(k in -20.0..20.0f64, xi in -20.0..20.0f64, beta in 0.1..3.0f64, eps in 0.001..1.0f64) {
        prop_assume!(k * k + xi * xi > 1e-6);
        let a = rossby_frequency(k, xi, beta, eps).unwrap();
        let b = rossby_frequency(-k, xi, beta, eps).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn inviscid_propagation_is_unitary(t in 0.0..10.0f64, eps in 0.01..1.0f64) {
        let p = RossbyParameters { epsilon: eps, beta: 1.0, nu_h: 0.0 };
        let s = SpectralState::from_streamfunction(&blob(grid()), p).unwrap();
        let e0 = s.energy();
        prop_assert!((s.propagate(t).unwrap().energy() - e0).abs() < 1e-12 * e0);
    }
}

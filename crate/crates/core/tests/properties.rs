use proptest::prelude::*;
use spinlab::analytics::{f_rs, f_tap, xi_codim1, MixedModel, ModelOrder, SphericalPSpin};
use spinlab::sim::{
    langevin_run, mc_restricted_free_energy, plant_critical_field, rng, sample_codim1_field, sample_pure_field,
    Landscape, LangevinConfig, SphereState,
};

fn state(n: usize, seed: u64) -> SphereState {
    SphereState::uniform(n, &mut rng::stream(seed, rng::Domain::Probe, 0))
}

fn tangent(x: &SphereState, seed: u64) -> Vec<f64> {
    let mut v = state(x.dim(), seed ^ 0x5eed).into_coords();
    x.project_tangent(&mut v);
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / norm).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn retraction_stays_on_the_sphere(n in 2usize..200, seed: u64, scale in 1e-6f64..10.0) {
        let x = state(n, seed);
        let v: Vec<f64> = tangent(&x, seed).iter().map(|a| a * scale).collect();
        let y = x.retract(&v).unwrap();
        prop_assert!(y.norm_error() <= 1e-12);
    }

    #[test]
    fn gradient_is_tangent_and_matches_differences(p in 3u32..5, n in 3usize..14, seed: u64) {
        let f = sample_pure_field(p, n, seed).unwrap();
        let x = state(n, seed);
        let (e, g) = f.energy_grad(&x);
        let tang: f64 = g.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
        prop_assert!(tang.abs() <= 1e-10 * (1.0 + g.iter().map(|a| a.abs()).sum::<f64>()));
        let v = tangent(&x, seed);
        let h = 1e-6;
        let moved = x.retract(&v.iter().map(|a| a * h).collect::<Vec<_>>()).unwrap();
        let fd = (f.energy(moved.coords()) - e) / h;
        let exact: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!((fd - exact).abs() <= 1e-4 * exact.abs().max(1.0), "fd {} vs {}", fd, exact);
    }

    #[test]
    fn planted_center_is_critical(p in 3u32..5, n in 3usize..24, shift in 0.0f64..1.0, seed: u64) {
        let e0 = SphericalPSpin::new(p).unwrap().e_zero();
        let e = (e0 - 0.2) * (1.0 - shift);
        let f = plant_critical_field(p, n, e, seed).unwrap();
        let c = f.center();
        let (h, g) = f.energy_grad(&c);
        prop_assert_eq!(h, n as f64 * e);
        prop_assert!(g.iter().map(|a| a * a).sum::<f64>().sqrt() <= 1e-8 * n as f64);
    }

    #[test]
    fn seeds_reproduce_trajectories(n in 3usize..16, seed: u64) {
        let f = sample_pure_field(3, n, seed).unwrap();
        let cfg = LangevinConfig { dt: Some(1e-3), ..LangevinConfig::new(1.0, 50, seed) };
        let a = langevin_run(&f, state(n, seed), None, &cfg).unwrap();
        let b = langevin_run(&f, state(n, seed), None, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn codim_covariance_at_one_matches_weights(p in 3u32..8, q in 0.0f64..0.99) {
        let m = MixedModel::codim1(p, q);
        let total: f64 = m.squared_weights().iter().sum();
        prop_assert!((total - xi_codim1(p, 1.0, q)).abs() <= 1e-12);
        prop_assert!((m.value(0.4) - xi_codim1(p, 0.4, q)).abs() <= 1e-12);
    }

    #[test]
    fn codim_weights_vanish_at_the_pole(p in 3u32..6, n in 3usize..10, seed: u64) {
        let f = sample_codim1_field(p, 1.0, n, seed).unwrap();
        prop_assert!(f.weights().iter().all(|(_, w)| *w == 0.0));
    }

    #[test]
    fn fixed_point_solves_and_tap_matches_rs(p in 3u32..7, s in 0.0f64..1.0, boost in 1.0f64..3.0) {
        let model = SphericalPSpin::new(p).unwrap();
        let e = model.e_zero() + s * (model.e_infinity() - model.e_zero());
        let beta = model.beta_star(e).unwrap() * boost;
        let fp = model.solve_fixed_point(e, beta).unwrap();
        prop_assert!(fp.residual <= 1e-10);
        prop_assert!(fp.q_star >= model.order().q_branch_floor() - 1e-12);
        let order = ModelOrder::new(p).unwrap();
        if let Ok(tap) = f_tap(order, e, fp.q_star, beta) {
            prop_assert_eq!(tap, f_rs(order, e, fp.q_star, beta).unwrap());
        }
    }
}

#[test]
fn infinite_temperature_free_energy_is_exactly_zero() {
    for seed in 0..4 {
        let f = sample_pure_field(3, 8, seed).unwrap();
        assert_eq!(mc_restricted_free_energy(&f, 0.0, None, 1000, seed).unwrap().estimate, 0.0);
    }
}

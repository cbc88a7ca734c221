use lbm_quartic::bench::*;
use lbm_quartic::mrt::*;
use lbm_quartic::params::*;
use lbm_quartic::stencil::Q;
use lbm_quartic::verify::random_periodic_state;
use proptest::prelude::*;

fn quartic() -> SchemeParameters {
    quartic_set(&QuarticInputs::default()).unwrap().to_scheme().unwrap()
}

fn usual() -> SchemeParameters {
    usual_preset(USUAL_DEFAULT_SIGMA_X).unwrap().to_scheme().unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn thread_count_does_not_change_results() {
    let run = || {
        let mut st = random_periodic_state([12, 10, 8], &quartic(), 1e-3, 5).unwrap();
        st.run(20);
        st.populations().to_vec()
    };
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert!(one.iter().zip(&four).all(|(a, b)| a.to_bits() == b.to_bits()));

    let sphere = |threads| {
        in_pool(threads, || {
            let cfg = SphereConfig { n: 16, radius: 7.0, steps: 6, ..Default::default() };
            run_sphere(&cfg, &quartic()).unwrap()
        })
    };
    assert_eq!(sphere(1), sphere(3));
}

#[test]
fn single_step_conserves_momentum() {
    let mut st = random_periodic_state([8, 8, 8], &quartic(), 1e-2, 9).unwrap();
    let audit = ConservationAudit::start(&st);
    st.step();
    let r = audit.check(&st);
    let sites = 512.0;
    assert!(r.momentum_drift.iter().all(|d| *d <= 1e-13 * sites), "{:?}", r.momentum_drift);
    assert!(r.mass_drift <= 1e-14);
}

#[test]
fn long_periodic_run_conserves_mass() {
    let mut st = random_periodic_state([16, 16, 16], &usual(), 1e-2, 1).unwrap();
    let audit = ConservationAudit::start(&st);
    st.run(1000);
    assert!(audit.check(&st).mass_drift <= 1e-12);
}

#[test]
fn sphere_with_constant_wall_density_keeps_its_mass() {
    let cfg = SphereConfig { n: 20, radius: 9.0, amplitude: 0.0, steps: 30, ..Default::default() };
    let mut st = sphere_state(&cfg, &quartic()).unwrap();
    let audit = ConservationAudit::start(&st);
    st.run(30);
    let r = audit.check(&st);
    assert_eq!(r.mass_drift, 0.0);
    assert!(st.densities().iter().all(|&rho| rho == RHO_0));
}

#[test]
fn shear_decay_matches_the_spectral_rate() {
    let r = run_shear_decay(&ShearDecayConfig::default(), &quartic()).unwrap().summary;
    assert!(r.rel_error_spectral <= 1e-8, "{r:?}");
    // the k^6 correction is far below this at 2 pi / 64
    assert!(r.rel_error_reference <= 1e-4, "{r:?}");
}

#[test]
fn shear_rate_is_independent_of_amplitude() {
    let cfg = ShearDecayConfig { steps: 300, ..Default::default() };
    let a = run_shear_decay(&cfg, &quartic()).unwrap().summary.rate;
    let b = run_shear_decay(&ShearDecayConfig { amplitude: cfg.amplitude / 2.0, ..cfg }, &quartic()).unwrap().summary.rate;
    assert!(((a - b) / a).abs() <= 1e-10, "{a} {b}");
}

#[test]
fn plane_wave_matches_spectral_and_reference() {
    let r = run_plane_wave(&PlaneWaveConfig::default(), &quartic()).unwrap().summary;
    assert!(r.rel_error_omega_spectral <= 1e-8, "{r:?}");
    assert!(r.rel_error_rate_spectral <= 1e-8, "{r:?}");
    assert!(r.rel_error_omega_reference <= 1e-5, "{r:?}");
    assert!(r.rel_error_rate_reference <= 1e-3, "{r:?}");
}

#[test]
fn field_dumps_round_trip() {
    let cfg = SphereConfig { n: 10, radius: 4.0, steps: 3, ..Default::default() };
    let r = run_sphere(&cfg, &quartic()).unwrap();
    let mut bin = Vec::new();
    write_fields_binary(&mut bin, &r.fields).unwrap();
    assert_eq!(&bin[..8], b"LQFIELD1");
    assert_eq!(bin.len(), 8 + 4 * 8 + 10 * 10 * 10 * 4 * 8);
    let back = read_fields_binary(&bin[..]).unwrap();
    assert_eq!(back.shape, [10, 10, 10]);
    assert_eq!(back.step, 3);
    for (a, b) in back.values.iter().zip(&r.fields.values) {
        match (a, b) {
            (Some(x), Some(y)) => assert!(x.iter().zip(y).all(|(u, v)| u.to_bits() == v.to_bits())),
            (None, None) => {}
            _ => panic!("solid mask changed"),
        }
    }
    let mut csv = Vec::new();
    write_fields_csv(&mut csv, &r.fields, None).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x,y,z,rho,qx,qy,qz\n"));
    assert_eq!(text.lines().count(), 1 + r.fluid_sites);
}

fn arb_populations() -> impl Strategy<Value = [f64; Q]> {
    prop::array::uniform27(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collision_is_linear(a in arb_populations(), b in arb_populations(), t in -2.0f64..2.0) {
        let k = CollisionKernel::new(&quartic());
        let mut fa = a;
        let mut fb = b;
        let mut fab: [f64; Q] = std::array::from_fn(|j| a[j] + t * b[j]);
        k.collide(&mut fa);
        k.collide(&mut fb);
        k.collide(&mut fab);
        for j in 0..Q {
            prop_assert!((fab[j] - (fa[j] + t * fb[j])).abs() <= 1e-12);
        }
    }

    #[test]
    fn collision_keeps_density_and_momentum(f in arb_populations()) {
        let k = CollisionKernel::new(&quartic());
        let (rho, q) = k.conserved(&f);
        let mut g = f;
        k.collide(&mut g);
        let (rho2, q2) = k.conserved(&g);
        prop_assert!((rho - rho2).abs() <= 1e-13);
        for a in 0..3 {
            prop_assert!((q[a] - q2[a]).abs() <= 1e-13);
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point(rho in 0.5f64..1.5, qx in -0.1f64..0.1, qy in -0.1f64..0.1, qz in -0.1f64..0.1) {
        let k = CollisionKernel::new(&quartic());
        let f = k.equilibrium_populations(rho, [qx, qy, qz]);
        let mut g = f;
        k.collide(&mut g);
        for j in 0..Q {
            prop_assert!((g[j] - f[j]).abs() <= 1e-14);
        }
    }
}

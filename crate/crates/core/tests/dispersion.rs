use lbm_quartic::params::*;
use lbm_quartic::spectral::*;
use lbm_quartic::stencil::MomentMatrix;
use lbm_quartic::verify::oracle::{char_poly, matching_distance, poly_roots};
use num_complex::Complex64;
use proptest::prelude::*;

fn quartic() -> SchemeParameters {
    quartic_set(&QuarticInputs::default()).unwrap().to_scheme().unwrap()
}

fn arb_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_fn(n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1)))
}

fn arb_rates() -> impl Strategy<Value = RelaxationRates> {
    prop::array::uniform10(0.05f64..1.95).prop_map(|s| RelaxationRates {
        s_e: s[0],
        s_x: s[1],
        s_phi: s[2],
        s_psi: s[3],
        s_eps: s[4],
        s_xi: s[5],
        s_gamma: s[6],
        s_chi: s[7],
        s_tau: s[8],
        s_omega: s[9],
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_agree_with_polynomial_roots(a in (2usize..=6).prop_flat_map(arb_matrix)) {
        let e = eigen(&a).unwrap();
        let want = poly_roots(&char_poly(&a));
        prop_assert!(matching_distance(&e.values, &want) <= 1e-9);
        prop_assert!(e.residuals(&a).into_iter().fold(0.0, f64::max) <= 1e-12);
    }

    #[test]
    fn rest_spectrum_is_one_minus_rates(rates in arb_rates()) {
        let params = SchemeParameters { equilibrium: quartic().equilibrium, rates };
        let m = MomentMatrix::d3q27();
        let a = build_amplification(&build_collision_matrix(m, &params), m, [0.0; 3]);
        let mut got: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|z| {
            assert!(z.im.abs() < 1e-12);
            z.re
        }).collect();
        let mut want = vec![1.0; 4];
        for g in RateGroup::ALL {
            want.extend(g.members().map(|_| 1.0 - rates.get(g)));
        }
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12, "{} vs {}", g, w);
        }
    }
}

#[test]
fn hydrodynamic_branches_at_small_k() {
    let p = quartic();
    let m = MomentMatrix::d3q27();
    let c = build_collision_matrix(m, &p);
    let refs = ReferenceCoefficients::from_params(&p).unwrap();
    for dir in [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [1.0, 2.0, 3.0]] {
        let k = 0.02;
        let r = hydrodynamic_branches(&c, m, dir, &[k]).unwrap();
        for b in Branch::ALL {
            let g = r.gamma(0, b);
            let t = refs.target(b, k);
            assert!((g - t).norm() <= 1e-6 * t.norm(), "{dir:?} {}: {g} vs {t}", b.name());
        }
        assert!(r.gamma(0, Branch::AcousticPlus).im > 0.0);
        assert!(r.gamma(0, Branch::AcousticMinus).im < 0.0);
    }
}

#[test]
fn opposite_wavevector_gives_conjugate_spectrum() {
    let p = quartic();
    let m = MomentMatrix::d3q27();
    let c = build_collision_matrix(m, &p);
    let k = [0.3, -0.2, 0.7];
    let mut a: Vec<Complex64> = eigenvalues(&build_amplification(&c, m, k)).unwrap();
    let b: Vec<Complex64> = eigenvalues(&build_amplification(&c, m, k.map(|v| -v))).unwrap().iter().map(|z| z.conj()).collect();
    a.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut used = vec![false; b.len()];
    for z in &a {
        let j = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| (b[i] - z).norm().total_cmp(&(b[j] - z).norm())).unwrap();
        used[j] = true;
        assert!((b[j] - z).norm() < 1e-10);
    }
}

#[test]
fn shear_error_orders() {
    let kmags = log_spaced(DEFAULT_K_WINDOW.0, DEFAULT_K_WINDOW.1, DEFAULT_K_POINTS);
    let slope = |p: SchemeParameters| {
        let m = MomentMatrix::d3q27();
        let r = hydrodynamic_branches(&build_collision_matrix(m, &p), m, [1.0, 0.0, 0.0], &kmags).unwrap();
        let e = dispersion_errors(&r, &ReferenceCoefficients::from_params(&p).unwrap());
        fit_all(&e, DEFAULT_K_WINDOW).unwrap()[0].slope
    };
    assert!((slope(quartic()) - 6.0).abs() < 0.4);
    assert!((slope(usual_preset(0.039).unwrap().to_scheme().unwrap()) - 4.0).abs() < 0.4);
}

use lbm_quartic::exact::{from_f64_decimal, parse_decimal, to_f64, Rational};
use lbm_quartic::params::*;
use lbm_quartic::Error;
use num_traits::Signed;
use proptest::prelude::*;

// 50-digit values printed for c0 = 0.623538, sigma_e = 0.552, sigma_x = 0.039.
const BETA: &str = "0.50345521670787922851706691010021052631578947368420";
const S_PHI: &str = "0.37925445705024311183144246353322528363047001620745";
const S_EPS: &str = "0.34253657030513141274711235609982461596733955718034";
const S_GAMMA: &str = "1.9945477114942149093456286590460711496091258797386";
const S_CHI: &str = "1.2940799466197218037166471960307116873345869400515";
const S_TAU: &str = "1.9451616927239606019667013153498030552793202566039";
const S_OMEGA: &str = "0.25131560984615404581501005329813711811837082814760";
const S_E: &str = "0.95057034220532319391634980988593155893536121673004";
const S_X: &str = "1.8552875695732838589981447124304267161410018552876";

fn rel(got: &Rational, want: &str) -> f64 {
    let want = parse_decimal(want).unwrap();
    to_f64(&((got - &want) / &want).abs())
}

#[test]
fn reference_quartic_values_to_fourteen_digits() {
    let sol = quartic_parameters(0.623538, 0.552, 0.039).unwrap();
    assert!(rel(&sol.beta, BETA) < 1e-14);
    assert!(rel(&sol.c2, "2.436118") == 0.0);
    let checks = [
        (&sol.sigma_phi, S_PHI),
        (&sol.sigma_eps, S_EPS),
        (&sol.sigma_gamma, S_GAMMA),
        (&sol.sigma_chi, S_CHI),
        (&sol.sigma_tau, S_TAU),
        (&sol.sigma_omega, S_OMEGA),
    ];
    for (sigma, want) in checks {
        let d = rel(&rate_from_sigma_exact(sigma), want);
        assert!(d < 1e-14, "{want}: {d:e}");
    }
}

#[test]
fn reference_rates_of_the_inputs() {
    let set = quartic_set(&QuarticInputs::default()).unwrap();
    assert!(rel(&set.rate_of(RateGroup::Energy), S_E) < 1e-14);
    assert!(rel(&set.rate_of(RateGroup::Shear), S_X) < 1e-14);
    let p = set.to_scheme().unwrap();
    assert_eq!(p.rates.s_psi, 1.3);
    assert_eq!(p.rates.s_xi, 1.2);
    assert_eq!(p.equilibrium.xi, 1.0);
    for g in RateGroup::ALL {
        let s = p.rates.get(g);
        assert!(s > 0.0 && s < 2.0, "{}", g.name());
    }
}

#[test]
fn reference_transport() {
    let t = quartic_set(&QuarticInputs::default()).unwrap().to_scheme().unwrap().transport().unwrap();
    for (got, want) in [(t.mu, 0.013), (t.zeta, 0.0920492), (t.gamma, 0.0546913)] {
        assert!(((got - want) / want).abs() <= 1e-6, "{got} vs {want}");
    }
}

/// Straight double-precision evaluation of the transport formulas.
#[test]
fn exact_transport_matches_double_formulas() {
    for src in [
        ParameterSource::Quartic(QuarticInputs::default()),
        ParameterSource::Trt { sigma_x: 0.006 },
        ParameterSource::Usual { sigma_x: 0.039 },
    ] {
        let set = src.resolve_exact().unwrap();
        let p = set.to_scheme().unwrap();
        let se = 1.0 / p.rates.s_e - 0.5;
        let sx = 1.0 / p.rates.s_x - 0.5;
        let c0 = p.equilibrium.c0;
        let mu = sx / 3.0;
        let zeta = se * (5.0 / 9.0 - c0 * c0);
        let gamma = (zeta + 4.0 * mu / 3.0) / 2.0;
        let [emu, ezeta, egamma] = set.transport_exact();
        for (a, b) in [(to_f64(&emu), mu), (to_f64(&ezeta), zeta), (to_f64(&egamma), gamma)] {
            assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }
}

#[test]
fn trt_preset_relations() {
    let set = trt_isotropic_preset(TRT_DEFAULT_SIGMA_X).unwrap();
    let p = set.to_scheme().unwrap();
    assert!((p.equilibrium.c0 * p.equilibrium.c0 - 1.0 / 3.0).abs() < 1e-16);
    assert_eq!(p.equilibrium.c2, 2.5);
    let t = p.transport().unwrap();
    assert!((t.mu - 0.002).abs() < 1e-15);
    let prod = set.sigma_of(RateGroup::Phi) * set.sigma_of(RateGroup::Shear);
    assert_eq!(prod, parse_decimal("1").unwrap() / from_f64_decimal(6.0));
}

#[test]
fn singular_inputs_are_named() {
    match quartic_parameters(0.623538, 0.5, 0.5) {
        Err(Error::SingularCombination(s)) => assert!(s.to_string().contains("sigma_x - sigma_e"), "{s}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(quartic_parameters(0.623538, 0.552, 0.05), Err(Error::StabilityViolation { .. })));
}

fn sigmas_f64(c0: f64, se: f64, sx: f64) -> Option<[f64; 8]> {
    let s = quartic_parameters(c0, se, sx).ok()?;
    Some([&s.beta, &s.c2, &s.sigma_phi, &s.sigma_eps, &s.sigma_gamma, &s.sigma_chi, &s.sigma_tau, &s.sigma_omega].map(to_f64))
}

#[test]
fn continuous_at_the_operating_point() {
    let base = sigmas_f64(0.623538, 0.552, 0.039).unwrap();
    let h = 1e-8;
    for axis in 0..3 {
        let mut x = [0.623538, 0.552, 0.039];
        x[axis] += h;
        let up = sigmas_f64(x[0], x[1], x[2]).unwrap();
        x[axis] -= 2.0 * h;
        let down = sigmas_f64(x[0], x[1], x[2]).unwrap();
        for i in 0..8 {
            // central difference against one-sided ones: a smooth map has them agree
            let central = (up[i] - down[i]) / (2.0 * h);
            let forward = (up[i] - base[i]) / h;
            assert!((up[i] - base[i]).abs() <= 1e-8 * (central.abs() * 2.0 + 1.0), "axis {axis} output {i}");
            assert!((forward - central).abs() <= 1e-5 * (central.abs() + 1.0), "axis {axis} output {i}: {forward} {central}");
        }
    }
}

proptest! {
    #[test]
    fn henon_round_trip(s in 1e-6f64..1.999_999) {
        let back = rate_from_sigma(sigma_from_rate(s).unwrap()).unwrap();
        let ulp = f64::from_bits(s.to_bits() + 1) - s;
        prop_assert!((back - s).abs() <= ulp, "{} -> {}", s, back);
    }

    #[test]
    fn sigma_phi_times_sigma_x_is_a_twelfth(se in 0.1f64..1.0, sx in 0.01f64..0.2) {
        prop_assume!((se - sx).abs() > 1e-3);
        let c0 = 0.623538;
        if let Ok(s) = quartic_parameters(c0, se, sx) {
            let prod = &s.sigma_phi * from_f64_decimal(sx);
            prop_assert_eq!(prod, parse_decimal("1").unwrap() / from_f64_decimal(12.0));
        }
    }

    #[test]
    fn stable_sets_have_rates_in_range(se in 0.1f64..1.0, sx in 0.01f64..0.2) {
        prop_assume!((se - sx).abs() > 1e-3);
        if let Ok(set) = quartic_set(&QuarticInputs { sigma_e: se, sigma_x: sx, ..Default::default() }) {
            for g in RateGroup::ALL {
                prop_assert!(set.sigma_of(g).is_positive());
            }
            prop_assert!(set.to_scheme().is_ok());
        }
    }
}

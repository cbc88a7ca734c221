//! Closed-form "quartic" parameters of the D3Q27 scheme.
//!
//! Every expression is a rational function of `c0^2`, `sigma_e` and `sigma_x`,
//! so the whole evaluation is carried out in exact rational arithmetic and only
//! rounded to double when a caller asks for `f64`. The polynomial coefficients
//! are large and alternate in sign; at the reference operating point several
//! terms cancel to about 1e-6 of their magnitude, which is why doubles are not
//! used here.

use num_traits::{One, Zero};

use crate::error::{Error, Result, Singularity};
use crate::exact::{frac, int, Rational};

/// `coefficient * (c0^2)^a * sigma_e^b * sigma_x^c`.
type Term = (i64, u32, u32, u32);

const BETA_POLY: &[Term] = &[
    (-9, 1, 0, 1),
    (-18, 1, 1, 0),
    (27, 2, 0, 1),
    (180, 1, 2, 1),
    (144, 1, 0, 3),
    (-8, 0, 0, 1),
    (8, 0, 1, 0),
    (-324, 2, 2, 1),
];

const EPS_NUM: &[Term] = &[
    (-76, 0, 0, 2),
    (27, 1, 0, 0),
    (-27, 2, 0, 0),
    (-180, 1, 2, 0),
    (-468, 1, 0, 2),
    (324, 2, 2, 0),
    (7776, 2, 0, 4),
    (-93312, 2, 2, 4),
    (-4, 0, 2, 0),
    (80, 0, 1, 1),
    (-336, 0, 1, 3),
    (-1344, 0, 2, 2),
    (240, 0, 0, 4),
    (-10800, 1, 1, 3),
    (-46656, 2, 3, 3),
    (20736, 1, 3, 3),
    (62208, 1, 1, 5),
    (-324, 2, 1, 1),
    (3888, 2, 3, 1),
    (864, 1, 2, 2),
    (-4752, 1, 3, 1),
    (51840, 1, 4, 2),
    (3888, 2, 2, 2),
    (-46656, 2, 4, 2),
    (324, 1, 1, 1),
    (-3456, 0, 0, 6),
    (2880, 0, 3, 3),
    (20736, 1, 0, 6),
    (8064, 0, 2, 4),
    (6912, 0, 1, 5),
    (-864, 1, 0, 4),
    (1440, 0, 3, 1),
    (-14400, 0, 4, 2),
    (324, 2, 0, 2),
    (31104, 1, 2, 4),
];

/// Bracket of the sigma_epsilon denominator (without `sigma_x (sigma_x - sigma_e)`).
const EPS_DEN: &[Term] = &[
    (-84, 0, 0, 3),
    (432, 1, 0, 3),
    (84, 0, 1, 2),
    (540, 1, 2, 1),
    (-23, 0, 0, 1),
    (-972, 2, 2, 1),
    (-27, 1, 0, 1),
    (81, 2, 0, 1),
    (23, 0, 1, 0),
    (-54, 1, 1, 0),
];

const GAMMA_NUM: &[Term] = &[
    (1968, 0, 0, 4),
    (-144, 1, 0, 2),
    (-15552, 1, 0, 4),
    (-624, 0, 2, 2),
    (-1344, 0, 1, 3),
    (4608, 0, 1, 5),
    (8064, 0, 2, 4),
    (-12672, 0, 0, 6),
    (103680, 1, 2, 4),
    (-186624, 2, 2, 4),
    (-27, 2, 0, 0),
    (27, 1, 0, 0),
    (-4, 0, 2, 0),
    (324, 2, 2, 0),
    (-180, 1, 2, 0),
    (80, 0, 1, 1),
    (-76, 0, 0, 2),
    (82944, 1, 0, 6),
    (15552, 2, 0, 4),
];

const CHI_NUM: &[Term] = &[
    (192, 0, 0, 4),
    (-828, 1, 0, 2),
    (972, 2, 0, 2),
    (6480, 1, 2, 2),
    (-2592, 1, 0, 4),
    (-11664, 2, 2, 2),
    (192, 0, 2, 2),
    (-384, 0, 1, 3),
    (2304, 0, 1, 5),
    (4032, 0, 2, 4),
    (-6336, 0, 0, 6),
    (76, 0, 0, 2),
    (51840, 1, 2, 4),
    (-93312, 2, 2, 4),
    (27, 2, 0, 0),
    (-27, 1, 0, 0),
    (4, 0, 2, 0),
    (-324, 2, 2, 0),
    (180, 1, 2, 0),
    (-80, 0, 1, 1),
    (41472, 1, 0, 6),
    (7776, 2, 0, 4),
];

const TAU_NUM: &[Term] = &[
    (76, 0, 0, 2),
    (-324, 2, 2, 0),
    (180, 1, 2, 0),
    (-144, 0, 0, 4),
    (-80, 0, 1, 1),
    (3456, 1, 0, 4),
    (720, 0, 2, 2),
    (-576, 0, 1, 3),
    (-504, 1, 0, 2),
    (4320, 1, 2, 2),
    (27, 2, 0, 0),
    (4, 0, 2, 0),
    (-27, 1, 0, 0),
    (-7776, 2, 2, 2),
    (648, 2, 0, 2),
];

/// Bracket of the sigma_tau denominator (without the leading `sigma_x`).
const TAU_DEN: &[Term] = &[
    (76, 0, 0, 2),
    (-528, 0, 0, 4),
    (-504, 1, 0, 2),
    (648, 2, 0, 2),
    (4320, 1, 2, 2),
    (3456, 1, 0, 4),
    (-7776, 2, 2, 2),
    (336, 0, 2, 2),
    (192, 0, 1, 3),
    (27, 2, 0, 0),
    (-27, 1, 0, 0),
    (4, 0, 2, 0),
    (-324, 2, 2, 0),
    (180, 1, 2, 0),
    (-80, 0, 1, 1),
];

const OMEGA_NUM: &[Term] = &[
    (-816, 0, 0, 4),
    (-828, 1, 0, 2),
    (972, 2, 0, 2),
    (6480, 1, 2, 2),
    (-2592, 1, 0, 4),
    (-11664, 2, 2, 2),
    (-816, 0, 2, 2),
    (1632, 0, 1, 3),
    (-17280, 0, 1, 5),
    (13824, 0, 2, 4),
    (3456, 0, 0, 6),
    (76, 0, 0, 2),
    (51840, 1, 2, 4),
    (-93312, 2, 2, 4),
    (27, 2, 0, 0),
    (-27, 1, 0, 0),
    (4, 0, 2, 0),
    (-324, 2, 2, 0),
    (180, 1, 2, 0),
    (-80, 0, 1, 1),
    (41472, 1, 0, 6),
    (7776, 2, 0, 4),
];

/// Bracket of the sigma_omega denominator (without the leading `sigma_x`).
const OMEGA_DEN: &[Term] = &[
    (-192, 0, 0, 4),
    (-828, 1, 0, 2),
    (972, 2, 0, 2),
    (6480, 1, 2, 2),
    (-2592, 1, 0, 4),
    (-11664, 2, 2, 2),
    (-192, 0, 2, 2),
    (384, 0, 1, 3),
    (2304, 0, 1, 5),
    (4032, 0, 2, 4),
    (-6336, 0, 0, 6),
    (76, 0, 0, 2),
    (51840, 1, 2, 4),
    (-93312, 2, 2, 4),
    (27, 2, 0, 0),
    (-27, 1, 0, 0),
    (4, 0, 2, 0),
    (-324, 2, 2, 0),
    (180, 1, 2, 0),
    (-80, 0, 1, 1),
    (41472, 1, 0, 6),
    (7776, 2, 0, 4),
];

struct Powers {
    c0_sq: Vec<Rational>,
    sigma_e: Vec<Rational>,
    sigma_x: Vec<Rational>,
}

impl Powers {
    fn new(c0_sq: &Rational, sigma_e: &Rational, sigma_x: &Rational) -> Self {
        let table = |base: &Rational, n: usize| {
            let mut v = vec![Rational::one()];
            for i in 1..=n {
                let next = &v[i - 1] * base;
                v.push(next);
            }
            v
        };
        Self { c0_sq: table(c0_sq, 2), sigma_e: table(sigma_e, 4), sigma_x: table(sigma_x, 6) }
    }

    fn eval(&self, poly: &[Term]) -> Rational {
        poly.iter().fold(Rational::zero(), |acc, &(coef, a, b, c)| {
            acc + int(coef) * &self.c0_sq[a as usize] * &self.sigma_e[b as usize] * &self.sigma_x[c as usize]
        })
    }
}

/// Exact quartic solution. Henon parameters `sigma_k`; rates follow from `s = 1/(sigma + 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticSolution {
    pub beta: Rational,
    pub c2: Rational,
    pub sigma_phi: Rational,
    pub sigma_eps: Rational,
    pub sigma_gamma: Rational,
    pub sigma_chi: Rational,
    pub sigma_tau: Rational,
    pub sigma_omega: Rational,
}

impl QuarticSolution {
    /// `(name, sigma)` for the six relaxation parameters fixed by the quartic conditions.
    pub fn sigmas(&self) -> [(&'static str, &Rational); 6] {
        [
            ("s_phi", &self.sigma_phi),
            ("s_eps", &self.sigma_eps),
            ("s_gamma", &self.sigma_gamma),
            ("s_chi", &self.sigma_chi),
            ("s_tau", &self.sigma_tau),
            ("s_omega", &self.sigma_omega),
        ]
    }
}

fn nonzero(v: Rational, which: Singularity) -> Result<Rational> {
    if v.is_zero() {
        Err(Error::SingularCombination(which))
    } else {
        Ok(v)
    }
}

/// Evaluates the eight closed forms. Rate range is not checked here; see
/// [`super::quartic_parameters`].
pub fn quartic_exact(c0_sq: &Rational, sigma_e: &Rational, sigma_x: &Rational) -> Result<QuarticSolution> {
    let sx = sigma_x;
    let diff = nonzero(sx - sigma_e, Singularity::ShearEqualsBulk)?;
    let sx = nonzero(sx.clone(), Singularity::ShearZero)?;
    let sx2 = &sx * &sx;
    let gamma_pole = nonzero(int(12) * &sx2 - int(1), Singularity::GammaPole)?;
    let chi_pole = nonzero(int(84) * &sx2 - int(1), Singularity::ChiPole)?;

    let p = Powers::new(c0_sq, sigma_e, &sx);

    let beta = -(p.eval(BETA_POLY) / (int(2) * &diff));
    let c2 = frac(5, 2) - int(42) * &sx2;
    let sigma_phi = Rational::one() / (int(12) * &sx);

    let eps_den = nonzero(&sx * &diff * p.eval(EPS_DEN), Singularity::EpsilonDenominator)?;
    let sigma_eps = -(p.eval(EPS_NUM) / (int(48) * eps_den));

    let diff2 = &diff * &diff;
    let sigma_gamma = p.eval(GAMMA_NUM) / (int(336) * &sx * &gamma_pole * &diff2);
    let sigma_chi = p.eval(CHI_NUM) / (int(96) * &sx * &chi_pole * &diff2);

    let tau_den = nonzero(&sx * p.eval(TAU_DEN), Singularity::TauDenominator)?;
    let sigma_tau = p.eval(TAU_NUM) / (int(12) * tau_den);

    let omega_den = nonzero(&sx * p.eval(OMEGA_DEN), Singularity::OmegaDenominator)?;
    let sigma_omega = p.eval(OMEGA_NUM) / (int(12) * omega_den);

    Ok(QuarticSolution { beta, c2, sigma_phi, sigma_eps, sigma_gamma, sigma_chi, sigma_tau, sigma_omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;

    fn d(s: &str) -> Rational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn sigma_phi_times_sigma_x_is_one_twelfth() {
        for (c, e, x) in [("0.388", "0.552", "0.039"), ("0.3", "0.1", "0.2"), ("0.5", "1.5", "0.07")] {
            let q = quartic_exact(&d(c), &d(e), &d(x)).unwrap();
            assert_eq!(&q.sigma_phi * d(x), frac(1, 12));
        }
    }

    #[test]
    fn singular_sets_are_reported() {
        let c = d("0.3");
        let cases = [
            (d("0.2"), d("0.2"), Singularity::ShearEqualsBulk),
            (d("0.2"), d("0"), Singularity::ShearZero),
        ];
        for (e, x, which) in cases {
            match quartic_exact(&c, &e, &x) {
                Err(Error::SingularCombination(s)) => assert_eq!(s, which),
                other => panic!("expected {which:?}, got {other:?}"),
            }
        }
    }
}

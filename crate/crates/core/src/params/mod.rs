//! Scalar parameters of the scheme: equilibrium coefficients, relaxation
//! rates, Henon parameters and the transport coefficients they induce.
//!
//! Parameter sets are assembled exactly (rationals) and rounded to `f64` only
//! when handed to the kernels. `c0` enters every formula through `c0^2`, which
//! keeps the TRT preset (`c0 = 1/sqrt(3)`) exact as well.

mod quartic;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use quartic::{quartic_exact, QuarticSolution};

use crate::error::{Error, Result};
use crate::exact::{frac, from_f64_decimal, int, to_f64, Rational};
use crate::stencil::{index, Q};

/// Reference density of the linearized regime.
pub const RHO_0: f64 = 1.0;

/// Henon's relation `sigma = 1/s - 1/2`.
pub fn sigma_from_rate(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidParameter { name: "s", reason: format!("rate {s} outside (0, 2)") });
    }
    Ok(1.0 / s - 0.5)
}

/// Inverse of [`sigma_from_rate`]: `s = 1/(sigma + 1/2)`.
pub fn rate_from_sigma(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter { name: "sigma", reason: format!("{sigma} is not positive") });
    }
    Ok(1.0 / (sigma + 0.5))
}

pub fn sigma_from_rate_exact(s: &Rational) -> Rational {
    Rational::one() / s - frac(1, 2)
}

pub fn rate_from_sigma_exact(sigma: &Rational) -> Rational {
    Rational::one() / (sigma + frac(1, 2))
}

/// Equilibrium coefficients of the non-conserved moments, in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCoefficients {
    pub c0: f64,
    pub theta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub beta: f64,
    pub xi: f64,
}

impl EquilibriumCoefficients {
    /// Builds the coefficients with `theta = 3 c0^2 - 2`.
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64, beta: f64, xi: f64) -> Self {
        Self { c0, theta: 3.0 * c0 * c0 - 2.0, c1, c2, c3, beta, xi }
    }

    pub fn has_isotropic_shear(&self) -> bool {
        self.c1 == -2.0 && self.c3 == 0.0
    }
}

/// One relaxation rate per moment group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationRates {
    pub s_e: f64,
    pub s_x: f64,
    pub s_phi: f64,
    pub s_psi: f64,
    pub s_eps: f64,
    pub s_xi: f64,
    pub s_gamma: f64,
    pub s_chi: f64,
    pub s_tau: f64,
    pub s_omega: f64,
}

/// Moment groups sharing one relaxation rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RateGroup {
    Energy,
    Shear,
    Phi,
    Psi,
    Epsilon,
    Xi,
    Gamma,
    Chi,
    Tau,
    Omega,
}

impl RateGroup {
    pub const ALL: [RateGroup; 10] = [
        RateGroup::Energy,
        RateGroup::Shear,
        RateGroup::Phi,
        RateGroup::Psi,
        RateGroup::Epsilon,
        RateGroup::Xi,
        RateGroup::Gamma,
        RateGroup::Chi,
        RateGroup::Tau,
        RateGroup::Omega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RateGroup::Energy => "s_e",
            RateGroup::Shear => "s_x",
            RateGroup::Phi => "s_phi",
            RateGroup::Psi => "s_psi",
            RateGroup::Epsilon => "s_eps",
            RateGroup::Xi => "s_xi",
            RateGroup::Gamma => "s_gamma",
            RateGroup::Chi => "s_chi",
            RateGroup::Tau => "s_tau",
            RateGroup::Omega => "s_omega",
        }
    }

    /// Moment rows relaxed with this group's rate.
    pub fn members(self) -> std::ops::Range<usize> {
        use index::*;
        match self {
            RateGroup::Energy => E..E + 1,
            RateGroup::Shear => XX..ZX + 1,
            RateGroup::Phi => PHI_X..PHI_X + 3,
            RateGroup::Psi => PSI_X..PSI_X + 3,
            RateGroup::Epsilon => EPS..EPS + 1,
            RateGroup::Xi => E3..E3 + 1,
            RateGroup::Gamma => XX_E..WW_E + 1,
            RateGroup::Chi => XY_E..ZX_E + 1,
            RateGroup::Tau => TAU_X..TAU_X + 3,
            RateGroup::Omega => XYZ..XYZ + 1,
        }
    }

    /// `None` for the conserved moments.
    pub fn of_moment(k: usize) -> Option<RateGroup> {
        RateGroup::ALL.into_iter().find(|g| g.members().contains(&k))
    }
}

impl RelaxationRates {
    pub fn get(&self, g: RateGroup) -> f64 {
        match g {
            RateGroup::Energy => self.s_e,
            RateGroup::Shear => self.s_x,
            RateGroup::Phi => self.s_phi,
            RateGroup::Psi => self.s_psi,
            RateGroup::Epsilon => self.s_eps,
            RateGroup::Xi => self.s_xi,
            RateGroup::Gamma => self.s_gamma,
            RateGroup::Chi => self.s_chi,
            RateGroup::Tau => self.s_tau,
            RateGroup::Omega => self.s_omega,
        }
    }

    pub fn uniform(s: f64) -> Self {
        Self {
            s_e: s,
            s_x: s,
            s_phi: s,
            s_psi: s,
            s_eps: s,
            s_xi: s,
            s_gamma: s,
            s_chi: s,
            s_tau: s,
            s_omega: s,
        }
    }

    /// Per-moment rates; zero on the conserved rows.
    pub fn per_moment(&self) -> [f64; Q] {
        let mut s = [0.0; Q];
        for g in RateGroup::ALL {
            for k in g.members() {
                s[k] = self.get(g);
            }
        }
        s
    }

    /// Checks `0 < s < 2` for every group.
    pub fn validate(&self) -> Result<()> {
        for g in RateGroup::ALL {
            let s = self.get(g);
            if !(s > 0.0 && s < 2.0) {
                return Err(Error::StabilityViolation { name: g.name(), value: s });
            }
        }
        Ok(())
    }
}

/// Physical scaling of the lattice: `dt = dx / lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeScale {
    pub lambda: f64,
    pub dx: f64,
}

impl Default for LatticeScale {
    fn default() -> Self {
        Self { lambda: 1.0, dx: 1.0 }
    }
}

impl LatticeScale {
    pub fn dt(&self) -> f64 {
        self.dx / self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportCoefficients {
    pub mu: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub nu: f64,
}

/// Shear viscosity, bulk viscosity and sound attenuation of the D3Q27 scheme.
pub fn transport(c0: f64, sigma_e: f64, sigma_x: f64) -> Result<TransportCoefficients> {
    transport_scaled(c0, sigma_e, sigma_x, LatticeScale::default())
}

pub fn transport_scaled(c0: f64, sigma_e: f64, sigma_x: f64, scale: LatticeScale) -> Result<TransportCoefficients> {
    let unit = scale.lambda * scale.dx;
    let mu = unit * sigma_x / 3.0;
    let zeta = unit * sigma_e * (5.0 / 9.0 - c0 * c0);
    if mu < 0.0 {
        return Err(Error::NegativeViscosity { name: "mu", value: mu });
    }
    if zeta < 0.0 {
        return Err(Error::NegativeViscosity { name: "zeta", value: zeta });
    }
    let gamma = (zeta + 4.0 / 3.0 * mu) / (2.0 * RHO_0);
    Ok(TransportCoefficients { mu, zeta, gamma, nu: mu / RHO_0 })
}

/// The quartic shear condition `mu = lambda dx / sqrt(108)` of the D2Q9/D3Q19
/// schemes. Reported only; no D2Q9 scheme is built here.
pub fn quartic_shear_condition_d2q9() -> f64 {
    1.0 / 108f64.sqrt()
}

/// `mu^2` of [`quartic_shear_condition_d2q9`] in lattice units, exactly.
pub fn quartic_shear_condition_d2q9_squared() -> Rational {
    frac(1, 108)
}

/// Complete parameter set in exact form.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactParameterSet {
    pub c0_sq: Rational,
    pub c1: Rational,
    pub c2: Rational,
    pub c3: Rational,
    pub beta: Rational,
    pub xi: Rational,
    /// Henon parameters in [`RateGroup::ALL`] order.
    pub sigma: [Rational; 10],
}

impl ExactParameterSet {
    pub fn sigma_of(&self, g: RateGroup) -> &Rational {
        let i = RateGroup::ALL.iter().position(|h| *h == g).expect("group listed");
        &self.sigma[i]
    }

    pub fn rate_of(&self, g: RateGroup) -> Rational {
        rate_from_sigma_exact(self.sigma_of(g))
    }

    pub fn theta(&self) -> Rational {
        int(3) * &self.c0_sq - int(2)
    }

    /// `(mu, zeta, gamma)` in lattice units, exactly.
    pub fn transport_exact(&self) -> [Rational; 3] {
        let mu = self.sigma_of(RateGroup::Shear) / int(3);
        let zeta = self.sigma_of(RateGroup::Energy) * (frac(5, 9) - &self.c0_sq);
        let gamma = (&zeta + frac(4, 3) * &mu) / int(2);
        [mu, zeta, gamma]
    }

    /// Errors with the offending rate when any `s` falls outside `(0, 2)`.
    pub fn check_stability(&self) -> Result<()> {
        for (g, sigma) in RateGroup::ALL.iter().zip(&self.sigma) {
            if !sigma.is_positive() {
                let s = if (sigma + frac(1, 2)).is_zero() { f64::INFINITY } else { to_f64(&self.rate_of(*g)) };
                return Err(Error::StabilityViolation { name: g.name(), value: s });
            }
        }
        Ok(())
    }

    pub fn to_scheme(&self) -> Result<SchemeParameters> {
        self.check_stability()?;
        if !self.c0_sq.is_positive() {
            return Err(Error::InvalidParameter { name: "c0", reason: "c0^2 must be positive".into() });
        }
        let c0 = to_f64(&self.c0_sq).sqrt();
        let equilibrium = EquilibriumCoefficients {
            c0,
            theta: to_f64(&self.theta()),
            c1: to_f64(&self.c1),
            c2: to_f64(&self.c2),
            c3: to_f64(&self.c3),
            beta: to_f64(&self.beta),
            xi: to_f64(&self.xi),
        };
        let s = |g| to_f64(&self.rate_of(g));
        let rates = RelaxationRates {
            s_e: s(RateGroup::Energy),
            s_x: s(RateGroup::Shear),
            s_phi: s(RateGroup::Phi),
            s_psi: s(RateGroup::Psi),
            s_eps: s(RateGroup::Epsilon),
            s_xi: s(RateGroup::Xi),
            s_gamma: s(RateGroup::Gamma),
            s_chi: s(RateGroup::Chi),
            s_tau: s(RateGroup::Tau),
            s_omega: s(RateGroup::Omega),
        };
        rates.validate()?;
        Ok(SchemeParameters { equilibrium, rates })
    }
}

/// Floating-point parameters consumed by the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParameters {
    pub equilibrium: EquilibriumCoefficients,
    pub rates: RelaxationRates,
}

impl SchemeParameters {
    pub fn validate(&self) -> Result<()> {
        self.rates.validate()?;
        let eq = &self.equilibrium;
        if !(eq.c0 > 0.0) {
            return Err(Error::InvalidParameter { name: "c0", reason: format!("{} is not positive", eq.c0) });
        }
        let theta = 3.0 * eq.c0 * eq.c0 - 2.0;
        if (eq.theta - theta).abs() > 1e-12 * theta.abs().max(1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{} differs from 3 c0^2 - 2 = {theta}", eq.theta),
            });
        }
        Ok(())
    }

    pub fn sigma(&self, g: RateGroup) -> f64 {
        1.0 / self.rates.get(g) - 0.5
    }

    pub fn transport(&self) -> Result<TransportCoefficients> {
        transport(self.equilibrium.c0, self.sigma(RateGroup::Energy), self.sigma(RateGroup::Shear))
    }
}

/// Free inputs of the quartic family. Defaults are the reference operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuarticInputs {
    pub c0: f64,
    pub sigma_e: f64,
    pub sigma_x: f64,
    pub s_psi: f64,
    pub s_xi: f64,
    pub xi: f64,
}

impl Default for QuarticInputs {
    fn default() -> Self {
        Self { c0: 0.623538, sigma_e: 0.552, sigma_x: 0.039, s_psi: 1.3, s_xi: 1.2, xi: 1.0 }
    }
}

/// Quartic closed forms at `(c0, sigma_e, sigma_x)`, with the rate range checked.
///
/// Inputs are read as the decimal literals they print as, so `0.623538` means
/// exactly 623538/10^6.
pub fn quartic_parameters(c0: f64, sigma_e: f64, sigma_x: f64) -> Result<QuarticSolution> {
    let c0 = from_f64_decimal(c0);
    let sol = quartic_exact(&(&c0 * &c0), &from_f64_decimal(sigma_e), &from_f64_decimal(sigma_x))?;
    for (name, sigma) in sol.sigmas() {
        if !sigma.is_positive() {
            let value = if (sigma + frac(1, 2)).is_zero() { f64::INFINITY } else { to_f64(&rate_from_sigma_exact(sigma)) };
            return Err(Error::StabilityViolation { name, value });
        }
    }
    Ok(sol)
}

fn positive_decimal(name: &'static str, x: f64) -> Result<Rational> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter { name, reason: format!("{x} must be positive") });
    }
    Ok(from_f64_decimal(x))
}

fn rate_decimal(name: &'static str, s: f64) -> Result<Rational> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::StabilityViolation { name, value: s });
    }
    Ok(sigma_from_rate_exact(&from_f64_decimal(s)))
}

/// Full quartic parameter set, free parameters included.
pub fn quartic_set(inputs: &QuarticInputs) -> Result<ExactParameterSet> {
    let c0 = positive_decimal("c0", inputs.c0)?;
    let sigma_e = positive_decimal("sigma_e", inputs.sigma_e)?;
    let sigma_x = positive_decimal("sigma_x", inputs.sigma_x)?;
    let sigma_psi = rate_decimal("s_psi", inputs.s_psi)?;
    let sigma_xi = rate_decimal("s_xi", inputs.s_xi)?;
    let sol = quartic_parameters(inputs.c0, inputs.sigma_e, inputs.sigma_x)?;
    Ok(ExactParameterSet {
        c0_sq: &c0 * &c0,
        c1: int(-2),
        c2: sol.c2,
        c3: Rational::zero(),
        beta: sol.beta,
        xi: from_f64_decimal(inputs.xi),
        sigma: [
            sigma_e,
            sigma_x,
            sol.sigma_phi,
            sigma_psi,
            sol.sigma_eps,
            sigma_xi,
            sol.sigma_gamma,
            sol.sigma_chi,
            sol.sigma_tau,
            sol.sigma_omega,
        ],
    })
}

/// Isotropic "TRT type" preset: `c0 = 1/sqrt(3)`, `beta = 4 - 9 c0^2`,
/// `sigma_phi = 1/(6 sigma_x)` shared by the odd groups, `sigma_x` shared by
/// the even groups. `xi = 1` and `c2 = 5/2` are defaults.
pub fn trt_isotropic_preset(sigma_x: f64) -> Result<ExactParameterSet> {
    let sx = positive_decimal("sigma_x", sigma_x)?;
    let sigma_phi = Rational::one() / (int(6) * &sx);
    Ok(two_rate_set(sx, sigma_phi))
}

/// Second-order reference: every group relaxes with `sigma_x`. Moving only
/// `sigma_phi` off the TRT preset leaves `|z| = 1.6` near the grid scale.
pub fn usual_preset(sigma_x: f64) -> Result<ExactParameterSet> {
    let sx = positive_decimal("sigma_x", sigma_x)?;
    Ok(two_rate_set(sx.clone(), sx))
}

fn two_rate_set(even: Rational, odd: Rational) -> ExactParameterSet {
    let c0_sq = frac(1, 3);
    let beta = int(4) - int(9) * &c0_sq;
    let groups = RateGroup::ALL.map(|g| match g {
        RateGroup::Phi | RateGroup::Psi | RateGroup::Tau | RateGroup::Omega => odd.clone(),
        _ => even.clone(),
    });
    ExactParameterSet { c0_sq, c1: int(-2), c2: frac(5, 2), c3: Rational::zero(), beta, xi: int(1), sigma: groups }
}

/// Default `sigma_x` of the TRT preset (shear viscosity 0.002).
pub const TRT_DEFAULT_SIGMA_X: f64 = 0.006;
/// Default `sigma_x` of the usual preset: same shear viscosity as the quartic set.
pub const USUAL_DEFAULT_SIGMA_X: f64 = 0.039;

/// Where a parameter set comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterSource {
    Quartic(QuarticInputs),
    Trt { sigma_x: f64 },
    Usual { sigma_x: f64 },
    Custom(SchemeParameters),
}

impl ParameterSource {
    /// Exact form; custom sets are read back from their decimal literals.
    pub fn resolve_exact(&self) -> Result<ExactParameterSet> {
        match self {
            ParameterSource::Quartic(q) => quartic_set(q),
            ParameterSource::Trt { sigma_x } => trt_isotropic_preset(*sigma_x),
            ParameterSource::Usual { sigma_x } => usual_preset(*sigma_x),
            ParameterSource::Custom(p) => {
                p.validate()?;
                let eq = &p.equilibrium;
                let c0 = from_f64_decimal(eq.c0);
                Ok(ExactParameterSet {
                    c0_sq: &c0 * &c0,
                    c1: from_f64_decimal(eq.c1),
                    c2: from_f64_decimal(eq.c2),
                    c3: from_f64_decimal(eq.c3),
                    beta: from_f64_decimal(eq.beta),
                    xi: from_f64_decimal(eq.xi),
                    sigma: RateGroup::ALL.map(|g| sigma_from_rate_exact(&from_f64_decimal(p.rates.get(g)))),
                })
            }
        }
    }

    pub fn resolve(&self) -> Result<SchemeParameters> {
        match self {
            // keep the user's doubles bit-for-bit
            ParameterSource::Custom(p) => {
                p.validate()?;
                Ok(*p)
            }
            _ => self.resolve_exact()?.to_scheme(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ParameterSource::Quartic(_) => "quartic",
            ParameterSource::Trt { .. } => "trt",
            ParameterSource::Usual { .. } => "usual",
            ParameterSource::Custom(_) => "custom",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;

    #[test]
    fn henon_boundary_and_reference_pairs() {
        assert!(sigma_from_rate(2.0).is_err());
        assert_eq!(sigma_from_rate_exact(&int(2)), Rational::zero());
        let s_x = 1.855_287_569_573_284;
        assert!((sigma_from_rate(s_x).unwrap() - 0.039).abs() < 1e-16);
        let s_e = 0.950_570_342_205_323_2;
        assert!((sigma_from_rate(s_e).unwrap() - 0.552).abs() < 1e-15);
        // exact: 1/(0.039 + 1/2) = 1000/539
        assert_eq!(rate_from_sigma_exact(&parse_decimal("0.039").unwrap()), frac(1000, 539));
    }

    #[test]
    fn henon_round_trip() {
        for i in 1..2000 {
            let s = i as f64 / 1000.0;
            let back = rate_from_sigma(sigma_from_rate(s).unwrap()).unwrap();
            let ulps = (back.to_bits() as i64 - s.to_bits() as i64).abs();
            assert!(ulps <= 1 || (back - s).abs() <= 4.0 * f64::EPSILON * s, "s = {s}, back = {back}");
        }
    }

    #[test]
    fn out_of_range_rates() {
        assert!(sigma_from_rate(0.0).is_err());
        assert!(sigma_from_rate(-0.1).is_err());
        assert!(rate_from_sigma(0.0).is_err());
        assert!(rate_from_sigma(-1.0).is_err());
    }

    #[test]
    fn transport_edge_cases() {
        let t = transport(0.623538, 0.552, 0.039).unwrap();
        assert!((t.mu - 0.013).abs() < 1e-15);
        assert!((t.zeta - 0.0920492).abs() / 0.0920492 < 1e-6);
        assert!((t.gamma - 0.0546913).abs() / 0.0546913 < 1e-6);
        assert_eq!(t.nu, t.mu);
        assert_eq!(transport(0.5, 0.3, 0.0).unwrap().mu, 0.0);
        let c0 = (5.0f64 / 9.0).sqrt();
        assert!(transport(c0, 1.0, 0.3).unwrap().zeta.abs() < 1e-16);
        assert!(matches!(transport(0.9, 1.0, 0.3), Err(Error::NegativeViscosity { name: "zeta", .. })));
        let scaled = transport_scaled(0.5, 0.3, 0.3, LatticeScale { lambda: 2.0, dx: 0.5 }).unwrap();
        assert!((scaled.mu - 0.1).abs() < 1e-15);
    }

    #[test]
    fn d2q9_condition() {
        assert!((quartic_shear_condition_d2q9() - 0.09622504486493763).abs() < 1e-16);
        let mu = quartic_shear_condition_d2q9();
        assert!((mu * mu - to_f64(&quartic_shear_condition_d2q9_squared())).abs() < 1e-17);
    }

    #[test]
    fn trt_preset_values() {
        let p = trt_isotropic_preset(0.006).unwrap();
        let sphi = Rational::one() / parse_decimal("0.036").unwrap();
        assert_eq!(*p.sigma_of(RateGroup::Phi), sphi);
        assert!((to_f64(&sphi) - 27.777_777_777_777_78).abs() < 1e-13);
        assert_eq!(p.rate_of(RateGroup::Phi), Rational::one() / (sphi + frac(1, 2)));
        assert_eq!(p.beta, int(1));
        let scheme = p.to_scheme().unwrap();
        let t = scheme.transport().unwrap();
        assert!((t.mu - 0.002).abs() < 1e-15);
        assert!((t.gamma - 0.002).abs() < 1e-15);

        let half = trt_isotropic_preset(0.5).unwrap();
        assert_eq!(*half.sigma_of(RateGroup::Phi), frac(1, 3));
        for g in [RateGroup::Energy, RateGroup::Shear, RateGroup::Epsilon, RateGroup::Xi, RateGroup::Gamma, RateGroup::Chi] {
            assert_eq!(*half.sigma_of(g), frac(1, 2));
        }
        for g in [RateGroup::Psi, RateGroup::Tau, RateGroup::Omega] {
            assert_eq!(half.sigma_of(g), half.sigma_of(RateGroup::Phi));
        }
        assert!(trt_isotropic_preset(0.0).is_err());
    }

    #[test]
    fn group_map_covers_non_conserved_moments() {
        for k in 0..Q {
            assert_eq!(RateGroup::of_moment(k).is_none(), k < 4, "moment {k}");
        }
        let sizes: Vec<usize> = RateGroup::ALL.iter().map(|g| g.members().len()).collect();
        assert_eq!(sizes, vec![1, 5, 3, 3, 1, 1, 2, 3, 3, 1]);
        let s = RelaxationRates::uniform(1.1).per_moment();
        assert_eq!(&s[..4], &[0.0; 4]);
    }

    #[test]
    fn quartic_singular_and_unstable() {
        assert!(matches!(
            quartic_parameters(0.6, 0.5, 0.5),
            Err(Error::SingularCombination(crate::error::Singularity::ShearEqualsBulk))
        ));
        // sigma_x = 0.05 drives s_gamma out of range
        let bad = quartic_set(&QuarticInputs { sigma_x: 0.05, ..Default::default() });
        assert!(matches!(bad, Err(Error::StabilityViolation { .. })), "{bad:?}");
    }

    #[test]
    fn custom_source_round_trips_rates() {
        let q = ParameterSource::Quartic(QuarticInputs::default()).resolve().unwrap();
        let custom = ParameterSource::Custom(q);
        assert_eq!(custom.resolve().unwrap(), q);
        let exact = custom.resolve_exact().unwrap().to_scheme().unwrap();
        assert!((exact.rates.s_phi - q.rates.s_phi).abs() < 1e-15);
    }
}

//! Moment-space relaxation and streaming on a 3D grid.

mod dump;
mod lattice;

pub use dump::{read_fields_binary, write_fields_binary, write_fields_csv, FieldFormat, FieldSnapshot};
pub use lattice::{BoundaryDensity, Domain, LatticeState};

use crate::params::{EquilibriumCoefficients, RelaxationRates, SchemeParameters};
use crate::stencil::{index, MomentMatrix, CONSERVED, Q};

pub type Moments = [f64; Q];

/// Equilibrium moments of `(rho, q)`; linear in both.
pub fn equilibrium_moments(rho: f64, q: [f64; 3], eq: &EquilibriumCoefficients) -> Moments {
    let mut m = [0.0; Q];
    m[index::RHO] = rho;
    m[index::QX..index::QX + 3].copy_from_slice(&q);
    m[index::E] = eq.theta * rho;
    for a in 0..3 {
        m[index::PHI_X + a] = eq.c1 * q[a];
        m[index::PSI_X + a] = eq.c2 * q[a];
        m[index::TAU_X + a] = eq.c3 * q[a];
    }
    m[index::EPS] = eq.beta * rho;
    m[index::E3] = eq.xi * rho;
    m
}

/// `m* = m + s (m_eq - m)` on the non-conserved rows.
pub fn relax(m: &Moments, m_eq: &Moments, s: &[f64; Q]) -> Moments {
    let mut out = *m;
    for k in CONSERVED..Q {
        out[k] = m[k] + s[k] * (m_eq[k] - m[k]);
    }
    out
}

/// Local collision with a fixed `(M, M^-1)` pair.
#[derive(Debug, Clone)]
pub struct CollisionKernel {
    rows: Vec<[f64; Q]>,
    inverse: Vec<[f64; Q]>,
    velocities: [[f64; 3]; Q],
    rates: [f64; Q],
    equilibrium: EquilibriumCoefficients,
    /// `f_eq` for unit density and for unit momentum along each axis.
    eq_rho: [f64; Q],
    eq_q: [[f64; Q]; 3],
}

impl CollisionKernel {
    pub fn new(params: &SchemeParameters) -> Self {
        let m = MomentMatrix::d3q27();
        Self::with_matrices(m.rows_f64().to_vec(), m.inverse_f64().to_vec(), params)
    }

    /// Any moment basis whose first four rows are `(rho, q)` and whose grouping
    /// matches the D3Q27 layout.
    pub fn with_matrices(rows: Vec<[f64; Q]>, inverse: Vec<[f64; Q]>, params: &SchemeParameters) -> Self {
        assert_eq!(rows.len(), Q);
        assert_eq!(inverse.len(), Q);
        let mut velocities = [[0.0; 3]; Q];
        for (j, v) in velocities.iter_mut().enumerate() {
            *v = [rows[index::QX][j], rows[index::QY][j], rows[index::QZ][j]];
        }
        let mut k = Self {
            rows,
            inverse,
            velocities,
            rates: params.rates.per_moment(),
            equilibrium: params.equilibrium,
            eq_rho: [0.0; Q],
            eq_q: [[0.0; Q]; 3],
        };
        k.eq_rho = k.to_populations(&equilibrium_moments(1.0, [0.0; 3], &k.equilibrium));
        for a in 0..3 {
            let mut q = [0.0; 3];
            q[a] = 1.0;
            k.eq_q[a] = k.to_populations(&equilibrium_moments(0.0, q, &k.equilibrium));
        }
        k
    }

    pub fn equilibrium(&self) -> &EquilibriumCoefficients {
        &self.equilibrium
    }

    pub fn rates(&self) -> &[f64; Q] {
        &self.rates
    }

    pub fn relaxation(&self) -> RelaxationRates {
        // regroup from the per-moment table
        RelaxationRates {
            s_e: self.rates[index::E],
            s_x: self.rates[index::XX],
            s_phi: self.rates[index::PHI_X],
            s_psi: self.rates[index::PSI_X],
            s_eps: self.rates[index::EPS],
            s_xi: self.rates[index::E3],
            s_gamma: self.rates[index::XX_E],
            s_chi: self.rates[index::XY_E],
            s_tau: self.rates[index::TAU_X],
            s_omega: self.rates[index::XYZ],
        }
    }

    pub fn to_moments(&self, f: &[f64; Q]) -> Moments {
        let mut m = [0.0; Q];
        for (mk, row) in m.iter_mut().zip(&self.rows) {
            *mk = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
        m
    }

    pub fn to_populations(&self, m: &Moments) -> [f64; Q] {
        let mut f = [0.0; Q];
        for (fj, row) in f.iter_mut().zip(&self.inverse) {
            *fj = row.iter().zip(m).map(|(a, b)| a * b).sum();
        }
        f
    }

    /// Equilibrium populations `M^-1 m_eq(rho, q)`.
    pub fn equilibrium_populations(&self, rho: f64, q: [f64; 3]) -> [f64; Q] {
        let mut f = [0.0; Q];
        for j in 0..Q {
            f[j] = rho * self.eq_rho[j] + q[0] * self.eq_q[0][j] + q[1] * self.eq_q[1][j] + q[2] * self.eq_q[2][j];
        }
        f
    }

    /// Density and momentum of a population vector.
    pub fn conserved(&self, f: &[f64; Q]) -> (f64, [f64; 3]) {
        let mut rho = 0.0;
        let mut q = [0.0; 3];
        for j in 0..Q {
            rho += f[j];
            for a in 0..3 {
                q[a] += self.velocities[j][a] * f[j];
            }
        }
        (rho, q)
    }

    pub fn collide(&self, f: &mut [f64; Q]) {
        let m = self.to_moments(f);
        let m_eq = equilibrium_moments(m[index::RHO], [m[index::QX], m[index::QY], m[index::QZ]], &self.equilibrium);
        *f = self.to_populations(&relax(&m, &m_eq, &self.rates));
    }
}

//! Raw and orthogonalized D3Q27 moment matrices.
//!
//! All construction is done in exact rational arithmetic. The raw rows carry
//! the prefactors 3, 9/2 and 3/2 of the moment definitions, which makes some
//! raw entries fractional (odd `|v|^2` velocities); after Gram-Schmidt every
//! entry is an integer, and that is checked rather than assumed.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use super::velocity::{build_velocities, VelocitySet, Q};
use crate::error::{Error, Result};
use crate::exact::{frac, int, to_f64, Rational};

/// Row indices of the moment vector.
pub mod index {
    pub const RHO: usize = 0;
    pub const QX: usize = 1;
    pub const QY: usize = 2;
    pub const QZ: usize = 3;
    pub const E: usize = 4;
    pub const XX: usize = 5;
    pub const WW: usize = 6;
    pub const XY: usize = 7;
    pub const YZ: usize = 8;
    pub const ZX: usize = 9;
    pub const PHI_X: usize = 10;
    pub const PSI_X: usize = 13;
    pub const EPS: usize = 16;
    pub const E3: usize = 17;
    pub const XX_E: usize = 18;
    pub const WW_E: usize = 19;
    pub const XY_E: usize = 20;
    pub const YZ_E: usize = 21;
    pub const ZX_E: usize = 22;
    pub const TAU_X: usize = 23;
    pub const XYZ: usize = 26;
}

pub const MOMENT_NAMES: [&str; Q] = [
    "rho", "qx", "qy", "qz", "e", "XX", "WW", "XY", "YZ", "ZX", "phi_x", "phi_y", "phi_z", "psi_x",
    "psi_y", "psi_z", "eps", "e3", "XX_e", "WW_e", "XY_e", "YZ_e", "ZX_e", "tau_x", "tau_y", "tau_z",
    "XYZ",
];

/// Number of conserved moments (density and momentum).
pub const CONSERVED: usize = 4;

pub type RationalMatrix = Vec<Vec<Rational>>;

/// The non-orthogonal moment rows, one per moment definition.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMomentMatrix {
    rows: RationalMatrix,
}

impl RawMomentMatrix {
    pub fn rows(&self) -> &RationalMatrix {
        &self.rows
    }

    pub fn entry(&self, k: usize, j: usize) -> &Rational {
        &self.rows[k][j]
    }
}

fn raw_row_values(v: [i32; 3]) -> [Rational; Q] {
    let c = [v[0] as i64, v[1] as i64, v[2] as i64];
    let (x, y, z) = (c[0], c[1], c[2]);
    let e = x * x + y * y + z * z;
    let xx = 2 * x * x - y * y - z * z;
    let ww = y * y - z * z;
    // cyclic convention on (x, y, z): alpha+1 and alpha-1 taken modulo 3
    let tau = |a: usize| c[a] * (c[(a + 1) % 3].pow(2) - c[(a + 2) % 3].pow(2));
    [
        int(1),
        int(x),
        int(y),
        int(z),
        int(e),
        int(xx),
        int(ww),
        int(x * y),
        int(y * z),
        int(z * x),
        int(3 * e * x),
        int(3 * e * y),
        int(3 * e * z),
        frac(9 * e * e * x, 2),
        frac(9 * e * e * y, 2),
        frac(9 * e * e * z, 2),
        frac(3 * e * e, 2),
        frac(9 * e * e * e, 2),
        int(3 * xx * e),
        int(3 * ww * e),
        int(3 * x * y * e),
        int(3 * y * z * e),
        int(3 * z * x * e),
        int(tau(0)),
        int(tau(1)),
        int(tau(2)),
        int(x * y * z),
    ]
}

pub fn build_raw_moments(vs: &VelocitySet) -> Result<RawMomentMatrix> {
    if !vs.is_d3q27() {
        return Err(Error::NotD3Q27(format!(
            "expected 27 lexicographic tensor-product velocities, got {}",
            vs.len()
        )));
    }
    let columns: Vec<[Rational; Q]> = vs.velocities().iter().map(|v| raw_row_values(*v)).collect();
    let rows = (0..Q)
        .map(|k| columns.iter().map(|col| col[k].clone()).collect())
        .collect();
    Ok(RawMomentMatrix { rows })
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// The integer orthogonal moment matrix with its exact inverse.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    rows: Vec<[i64; Q]>,
    row_norms: [i64; Q],
    inverse: RationalMatrix,
    rows_f64: Vec<[f64; Q]>,
    inverse_f64: Vec<[f64; Q]>,
}

/// Gram-Schmidt from row 4 on: `M_i = M~_i - sum_{l<i} g_il M_l` with
/// `g_il = (M~_i . M_l) / (M_l . M_l)`, in exact arithmetic.
pub fn orthogonalize(raw: &RawMomentMatrix) -> Result<MomentMatrix> {
    let n = raw.rows.len();
    for i in 0..CONSERVED {
        for k in 0..i {
            if !dot(&raw.rows[i], &raw.rows[k]).is_zero() {
                return Err(Error::ConservedRowsNotOrthogonal(k, i));
            }
        }
    }

    let mut ortho: RationalMatrix = Vec::with_capacity(n);
    let mut norms: Vec<Rational> = Vec::with_capacity(n);
    for (i, raw_row) in raw.rows.iter().enumerate() {
        let mut row = raw_row.clone();
        if i >= CONSERVED {
            for (prev, norm) in ortho.iter().zip(&norms) {
                let g = dot(raw_row, prev) / norm;
                if g.is_zero() {
                    continue;
                }
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= &g * p;
                }
            }
        }
        let norm = dot(&row, &row);
        if norm.is_zero() {
            return Err(Error::DependentMoment { row: i, name: MOMENT_NAMES[i] });
        }
        ortho.push(row);
        norms.push(norm);
    }

    let mut rows = vec![[0i64; Q]; n];
    for (i, row) in ortho.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_integer() {
                return Err(Error::NonIntegerMoment {
                    row: i,
                    name: MOMENT_NAMES[i],
                    col: j,
                    value: crate::exact::fmt_rational(v),
                });
            }
            rows[i][j] = i64::try_from(v.to_integer()).expect("moment entries are small");
        }
    }
    MomentMatrix::from_integer_rows(rows)
}

/// `M^-1 = M^T diag(1/d_i)` for a matrix with pairwise orthogonal rows.
pub fn invert(rows: &[[i64; Q]]) -> Result<RationalMatrix> {
    let n = rows.len();
    let mut norms = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let d: i64 = r.iter().map(|v| v * v).sum();
        if d == 0 {
            return Err(Error::DependentMoment { row: i, name: MOMENT_NAMES.get(i).copied().unwrap_or("?") });
        }
        norms.push(d);
    }
    Ok((0..Q)
        .map(|j| (0..n).map(|l| frac(rows[l][j], norms[l])).collect())
        .collect())
}

impl MomentMatrix {
    fn from_integer_rows(rows: Vec<[i64; Q]>) -> Result<Self> {
        let inverse = invert(&rows)?;
        let mut row_norms = [0i64; Q];
        for (i, r) in rows.iter().enumerate() {
            row_norms[i] = r.iter().map(|v| v * v).sum();
        }
        let rows_f64 = rows.iter().map(|r| r.map(|v| v as f64)).collect();
        let inverse_f64 = inverse
            .iter()
            .map(|r| {
                let mut out = [0.0; Q];
                for (o, v) in out.iter_mut().zip(r) {
                    *o = to_f64(v);
                }
                out
            })
            .collect();
        Ok(Self { rows, row_norms, inverse, rows_f64, inverse_f64 })
    }

    /// The D3Q27 matrix, built once per process.
    pub fn d3q27() -> &'static MomentMatrix {
        static CELL: OnceLock<MomentMatrix> = OnceLock::new();
        CELL.get_or_init(|| {
            let raw = build_raw_moments(&build_velocities()).expect("D3Q27 raw moments");
            orthogonalize(&raw).expect("D3Q27 moment matrix is integral and nonsingular")
        })
    }

    pub fn rows(&self) -> &[[i64; Q]] {
        &self.rows
    }

    pub fn row_norms(&self) -> &[i64; Q] {
        &self.row_norms
    }

    pub fn inverse(&self) -> &RationalMatrix {
        &self.inverse
    }

    pub fn rows_f64(&self) -> &[[f64; Q]] {
        &self.rows_f64
    }

    pub fn inverse_f64(&self) -> &[[f64; Q]] {
        &self.inverse_f64
    }

    /// `m = M f`.
    pub fn to_moments(&self, f: &[f64; Q]) -> [f64; Q] {
        let mut m = [0.0; Q];
        for (mk, row) in m.iter_mut().zip(&self.rows_f64) {
            *mk = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
        m
    }

    /// `f = M^-1 m`.
    pub fn to_populations(&self, m: &[f64; Q]) -> [f64; Q] {
        let mut f = [0.0; Q];
        for (fj, row) in f.iter_mut().zip(&self.inverse_f64) {
            *fj = row.iter().zip(m).map(|(a, b)| a * b).sum();
        }
        f
    }

    /// Exact product `M M^-1`.
    pub fn product_with_inverse(&self) -> RationalMatrix {
        (0..Q)
            .map(|i| {
                (0..Q)
                    .map(|k| {
                        (0..Q).fold(Rational::zero(), |acc, j| acc + int(self.rows[i][j]) * &self.inverse[j][k])
                    })
                    .collect()
            })
            .collect()
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.rows.iter().flat_map(|r| r.iter()).map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// Largest `|M M^-1 - I|` entry using the floating-point copies.
pub fn float_inverse_defect(m: &MomentMatrix) -> f64 {
    let a = m.rows_f64();
    let b = m.inverse_f64();
    let mut worst: f64 = 0.0;
    for i in 0..Q {
        for k in 0..Q {
            let s: f64 = (0..Q).map(|j| a[i][j] * b[j][k]).sum();
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

pub fn is_identity(m: &RationalMatrix) -> bool {
    m.iter().enumerate().all(|(i, r)| {
        r.iter().enumerate().all(|(k, v)| if i == k { *v == int(1) } else { v.is_zero() })
    })
}

/// True when the raw matrix has at least one fractional entry (it does for D3Q27).
pub fn has_fractional_entries(raw: &RawMomentMatrix) -> bool {
    raw.rows.iter().flatten().any(|v| !v.is_integer() && !v.abs().is_zero())
}

#[cfg(test)]
mod tests {
    use super::index::*;
    use super::*;

    fn col(v: [i32; 3]) -> usize {
        build_velocities().index_of(v).unwrap()
    }

    #[test]
    fn raw_entries_by_hand() {
        let raw = build_raw_moments(&build_velocities()).unwrap();
        let c111 = col([1, 1, 1]);
        assert_eq!(*raw.entry(E, c111), int(3));
        assert_eq!(*raw.entry(XX, c111), int(0));
        assert_eq!(*raw.entry(XYZ, c111), int(1));
        // psi_x at (1,0,0): (9/2) |v|^4 v_x = 9/2, a fractional raw entry
        assert_eq!(*raw.entry(PSI_X, col([1, 0, 0])), frac(9, 2));
        assert!(has_fractional_entries(&raw));
        // tau_x = v_x (v_y^2 - v_z^2)
        assert_eq!(*raw.entry(TAU_X, col([1, 1, 0])), int(1));
        assert_eq!(*raw.entry(TAU_X, col([1, 0, 1])), int(-1));
        assert_eq!(*raw.entry(TAU_X + 1, col([1, 1, 0])), int(-1));
    }

    #[test]
    fn rejects_other_stencils() {
        let d3q7 = VelocitySet::from_velocities(vec![
            [0, 0, 0],
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
            [0, 0, 1],
            [0, 0, -1],
        ])
        .unwrap();
        assert!(matches!(build_raw_moments(&d3q7), Err(Error::NotD3Q27(_))));
    }

    #[test]
    fn conserved_rows_unchanged() {
        let raw = build_raw_moments(&build_velocities()).unwrap();
        let m = orthogonalize(&raw).unwrap();
        for k in 0..CONSERVED {
            for j in 0..Q {
                assert_eq!(int(m.rows()[k][j]), *raw.entry(k, j));
            }
        }
    }

    #[test]
    fn energy_row_after_projection() {
        // |v|^2 minus its mean 54/27 = 2
        let m = MomentMatrix::d3q27();
        assert_eq!(m.rows()[E][col([1, 1, 1])], 1);
        assert_eq!(m.rows()[E][col([0, 0, 0])], -2);
    }

    #[test]
    fn rows_pairwise_orthogonal() {
        let m = MomentMatrix::d3q27();
        for i in 0..Q {
            for k in 0..i {
                let s: i64 = (0..Q).map(|j| m.rows()[i][j] * m.rows()[k][j]).sum();
                assert_eq!(s, 0, "rows {i} and {k}");
            }
        }
    }

    #[test]
    fn row_norms() {
        let m = MomentMatrix::d3q27();
        assert_eq!(
            m.row_norms(),
            &[27, 18, 18, 18, 18, 36, 12, 12, 12, 12, 72, 72, 72, 72, 72, 72, 36, 216, 72, 24, 24, 24, 24, 8, 8, 8, 8]
        );
    }

    #[test]
    fn exact_inverse() {
        let m = MomentMatrix::d3q27();
        assert!(is_identity(&m.product_with_inverse()));
        for j in 0..Q {
            assert_eq!(m.inverse()[j][0], frac(1, 27));
        }
        assert!(float_inverse_defect(m) <= 1e-14);
    }

    #[test]
    fn invert_rejects_zero_row() {
        let mut rows = MomentMatrix::d3q27().rows().to_vec();
        rows[5] = [0; Q];
        assert!(invert(&rows).is_err());
    }

    #[test]
    fn dependent_row_detected() {
        let mut raw = build_raw_moments(&build_velocities()).unwrap();
        raw.rows[6] = raw.rows[5].clone();
        assert!(matches!(orthogonalize(&raw), Err(Error::DependentMoment { row: 6, .. })));
    }

    #[test]
    fn non_integer_result_detected() {
        let mut raw = build_raw_moments(&build_velocities()).unwrap();
        // dropping the factor 3 on phi_x makes the orthogonalized row fractional
        raw.rows[PHI_X] = raw.rows[PHI_X].iter().map(|v| v / int(7)).collect();
        assert!(matches!(orthogonalize(&raw), Err(Error::NonIntegerMoment { row: PHI_X, .. })));
    }
}

//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR to Schur form, eigenvectors by back substitution.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        Self::from_fn(rows.len(), |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues with unit-norm right eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    /// `||A v - z v|| / ||v||` per pair.
    pub fn residuals(&self, a: &CMatrix) -> Vec<f64> {
        self.values.iter().zip(&self.vectors).map(|(z, v)| residual(a, *z, v)).collect()
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(a: &CMatrix, z: C64, v: &[C64]) -> f64 {
    let av = a.mul_vec(v);
    let r: f64 = av.iter().zip(v).map(|(x, y)| (x - z * y).norm_sqr()).sum::<f64>().sqrt();
    r / vec_norm(v)
}

const MAX_SWEEPS_PER_VALUE: usize = 60;

/// Full spectrum of `a`.
pub fn eigen(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.n;
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: vec![] });
    }
    let (mut h, mut z) = hessenberg(a);
    schur(&mut h, &mut z)?;
    let values: Vec<C64> = (0..n).map(|i| h[(i, i)]).collect();
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let mut vectors = triangular_eigenvectors(&h, &z);
    for (k, v) in vectors.iter_mut().enumerate() {
        if residual(a, values[k], v) > 1e-13 * scale.max(1.0) {
            refine(a, values[k], v);
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let (mut h, mut z) = hessenberg(a);
    schur(&mut h, &mut z)?;
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

/// `A = Q H Q*` with `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.n;
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = vec_norm(&v);
        if alpha == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        for x in v.iter_mut() {
            *x /= vn;
        }
        // H <- P H with P = I - 2 v v*
        for j in k..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * dot;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let dot: C64 = (0..v.len()).map(|i| m[(r, k + 1 + i)] * v[i]).sum();
                for i in 0..v.len() {
                    m[(r, k + 1 + i)] -= 2.0 * dot * v[i].conj();
                }
            }
        }
        h[(k + 1, k)] = -phase * alpha;
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
    }
    (h, q)
}

/// Rotation `[c s; -conj(s) c]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let norm = (ax * ax + y.norm_sqr()).sqrt();
    if norm == 0.0 {
        (1.0, C64::zero())
    } else if ax == 0.0 {
        (0.0, y.conj() / y.norm())
    } else {
        let phase = x / ax;
        (ax / norm, phase * y.conj() / norm)
    }
}

/// Reduces Hessenberg `h` to upper triangular in place, accumulating into `z`.
fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.n;
    let eps = f64::EPSILON;
    let norm = h.norm_fro();
    let cap = MAX_SWEEPS_PER_VALUE * n.max(1);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > cap {
            return Err(Error::EigenNonConvergence { n, iterations: cap });
        }
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let (r1, r2) = (half_tr + disc, half_tr - disc);
            if (r1 - d).norm() <= (r2 - d).norm() {
                r1
            } else {
                r2
            }
        };
        for k in l..hi {
            let (x, y) = if k == l { (h[(l, l)] - mu, h[(l + 1, l)]) } else { (h[(k, k - 1)], h[(k + 1, k - 1)]) };
            let (c, s) = givens(x, y);
            let start = if k == l { l } else { k - 1 };
            for j in start..n {
                let (h1, h2) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c * h1 + s * h2;
                h[(k + 1, j)] = -s.conj() * h1 + c * h2;
            }
            if k > l {
                h[(k + 1, k - 1)] = C64::zero();
            }
            let last = (k + 2).min(hi);
            for i in 0..=last {
                let (h1, h2) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = c * h1 + s.conj() * h2;
                h[(i, k + 1)] = -s * h1 + c * h2;
            }
            for i in 0..n {
                let (z1, z2) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = c * z1 + s.conj() * z2;
                z[(i, k + 1)] = -s * z1 + c * z2;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C64::zero();
        }
    }
    Ok(())
}

/// Eigenvectors of upper triangular `t`, mapped back through `z`.
fn triangular_eigenvectors(t: &CMatrix, z: &CMatrix) -> Vec<Vec<C64>> {
    let n = t.n;
    let smin = (f64::EPSILON * t.norm_fro()).max(f64::MIN_POSITIVE * 1e10);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![C64::zero(); n];
            y[k] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let sum: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
                let mut d = t[(i, i)] - lambda;
                if d.norm() < smin {
                    d = C64::new(smin, 0.0);
                }
                y[i] = -sum / d;
                let big = y[i].norm();
                if big > 1e100 {
                    for v in y.iter_mut() {
                        *v /= big;
                    }
                }
            }
            let mut v = z.mul_vec(&y);
            let nv = vec_norm(&v);
            for x in v.iter_mut() {
                *x /= nv;
            }
            v
        })
        .collect()
}

/// Inverse iteration at a slightly perturbed shift.
fn refine(a: &CMatrix, lambda: C64, v: &mut Vec<C64>) {
    let n = a.n;
    let delta = 1e-10 * lambda.norm().max(1.0);
    let shifted = CMatrix::from_fn(n, |i, j| if i == j { a[(i, j)] - lambda - delta } else { a[(i, j)] });
    let Some(lu) = Lu::new(&shifted) else { return };
    let mut best = residual(a, lambda, v);
    let mut w = v.clone();
    for _ in 0..3 {
        w = lu.solve(&w);
        let nw = vec_norm(&w);
        if !(nw.is_finite() && nw > 0.0) {
            return;
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        let r = residual(a, lambda, &w);
        if r < best {
            best = r;
            v.clone_from(&w);
        }
    }
}

/// LU with partial pivoting.
pub(crate) struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn new(a: &CMatrix) -> Option<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))?;
            if lu[(p, k)].norm() == 0.0 {
                return None;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub(crate) fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Determinant, sign from the pivoting included.
    #[cfg(test)]
    pub(crate) fn det(&self) -> C64 {
        let n = self.lu.n;
        let mut d: C64 = (0..n).map(|i| self.lu[(i, i)]).product();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                d = -d;
            }
        }
        d
    }
}

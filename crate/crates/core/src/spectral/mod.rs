//! Linear stability analysis of the scheme: the one-step amplification matrix
//! at wavevector `k`, its hydrodynamic eigenvalues and their errors against
//! the target shear and acoustic dispersion relations.
//!
//! A plane wave `f(x) ~ exp(-i k.x)` streamed along `v_j` picks up the phase
//! `exp(+i k.v_j)`, so `A(k) = diag(exp(i k.v_j)) C`. Growth rates are
//! `Gamma = -ln z` on the principal branch.

mod eigen;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use eigen::{eigen, eigenvalues, CMatrix, EigenDecomposition};

use crate::error::{Error, Result};
use crate::exact::fmt_f64_digits;
use crate::params::SchemeParameters;
use crate::stencil::{index, MomentMatrix, CONSERVED, Q};

type C64 = Complex64;

/// Two eigenvalues closer than this cannot be told apart by tracking.
pub const TRACKING_TOLERANCE: f64 = 1e-6;

/// Default window for order fits, in radians per site.
pub const DEFAULT_K_WINDOW: (f64, f64) = (2.0 * PI / 128.0, 2.0 * PI / 16.0);
pub const DEFAULT_K_POINTS: usize = 16;

/// Real one-step collision operator in population space.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionMatrix {
    rows: Vec<[f64; Q]>,
}

/// `C = M^-1 ((I - S) + S E) M`, assembled directly as matrices.
pub fn build_collision_matrix(m: &MomentMatrix, params: &SchemeParameters) -> CollisionMatrix {
    let eq = &params.equilibrium;
    let s = params.rates.per_moment();
    // linear equilibrium map in moment space, nonzero in columns 0..4 only
    let mut e = [[0.0; Q]; Q];
    for k in 0..CONSERVED {
        e[k][k] = 1.0;
    }
    e[index::E][index::RHO] = eq.theta;
    e[index::EPS][index::RHO] = eq.beta;
    e[index::E3][index::RHO] = eq.xi;
    for a in 0..3 {
        e[index::PHI_X + a][index::QX + a] = eq.c1;
        e[index::PSI_X + a][index::QX + a] = eq.c2;
        e[index::TAU_X + a][index::QX + a] = eq.c3;
    }
    let mut relax = [[0.0; Q]; Q];
    for i in 0..Q {
        for j in 0..Q {
            let ident = if i == j { 1.0 } else { 0.0 };
            relax[i][j] = (1.0 - s[i]) * ident + s[i] * e[i][j];
        }
    }
    let mf = m.rows_f64();
    let minv = m.inverse_f64();
    let mut rm = [[0.0; Q]; Q];
    for i in 0..Q {
        for k in 0..Q {
            if relax[i][k] != 0.0 {
                for j in 0..Q {
                    rm[i][j] += relax[i][k] * mf[k][j];
                }
            }
        }
    }
    let mut rows = vec![[0.0; Q]; Q];
    for i in 0..Q {
        for k in 0..Q {
            if minv[i][k] != 0.0 {
                for j in 0..Q {
                    rows[i][j] += minv[i][k] * rm[k][j];
                }
            }
        }
    }
    CollisionMatrix { rows }
}

impl CollisionMatrix {
    pub fn rows(&self) -> &[[f64; Q]] {
        &self.rows
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(Q, |i, j| C64::new(self.rows[i][j], 0.0))
    }

    pub fn apply(&self, f: &[f64; Q]) -> [f64; Q] {
        std::array::from_fn(|i| self.rows[i].iter().zip(f).map(|(a, b)| a * b).sum())
    }

    /// Largest deviation of rows 0..4 of `M C M^-1` from the identity.
    pub fn conserved_row_defect(&self, m: &MomentMatrix) -> f64 {
        let mf = m.rows_f64();
        let minv = m.inverse_f64();
        let mut worst: f64 = 0.0;
        for r in 0..CONSERVED {
            // row r of M C
            let mut mc = [0.0; Q];
            for k in 0..Q {
                for j in 0..Q {
                    mc[j] += mf[r][k] * self.rows[k][j];
                }
            }
            for c in 0..Q {
                let v: f64 = (0..Q).map(|j| mc[j] * minv[j][c]).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// `A(k) = diag(exp(i k.v_j)) C`.
pub fn build_amplification(c: &CollisionMatrix, m: &MomentMatrix, k: [f64; 3]) -> CMatrix {
    let mf = m.rows_f64();
    let phase: Vec<C64> = (0..Q)
        .map(|j| {
            let kv = k[0] * mf[index::QX][j] + k[1] * mf[index::QY][j] + k[2] * mf[index::QZ][j];
            C64::from_polar(1.0, kv)
        })
        .collect();
    CMatrix::from_fn(Q, |i, j| phase[i] * c.rows[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "shear1")]
    Shear1,
    #[serde(rename = "shear2")]
    Shear2,
    #[serde(rename = "acoustic+")]
    AcousticPlus,
    #[serde(rename = "acoustic-")]
    AcousticMinus,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::Shear1, Branch::Shear2, Branch::AcousticPlus, Branch::AcousticMinus];

    pub fn name(self) -> &'static str {
        match self {
            Branch::Shear1 => "shear1",
            Branch::Shear2 => "shear2",
            Branch::AcousticPlus => "acoustic+",
            Branch::AcousticMinus => "acoustic-",
        }
    }

    pub fn is_acoustic(self) -> bool {
        matches!(self, Branch::AcousticPlus | Branch::AcousticMinus)
    }
}

/// Hydrodynamic growth rates along one direction, in [`Branch::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    /// Direction as given by the caller.
    pub direction: [f64; 3],
    pub kmags: Vec<f64>,
    pub gammas: Vec<[C64; 4]>,
    /// Largest `|z|` over the full spectrum at each `k`.
    pub spectral_radius: Vec<f64>,
}

impl DispersionResult {
    pub fn gamma(&self, i: usize, b: Branch) -> C64 {
        self.gammas[i][b as usize]
    }
}

fn unit(direction: [f64; 3]) -> Result<[f64; 3]> {
    let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter { name: "direction", reason: "must be a nonzero vector".into() });
    }
    Ok(direction.map(|v| v / n))
}

/// Weight of `v` on the span of the conserved columns of `M^-1`.
fn conserved_overlap(m: &MomentMatrix, v: &[C64]) -> f64 {
    let mf = m.rows_f64();
    let d = m.row_norms();
    let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    // columns of M^-1 are the rows of M scaled by 1/d, so the projection
    // coefficient on column i is (M v)_i / d_i and its weight |.|^2 / d_i
    let w: f64 = (0..CONSERVED)
        .map(|i| {
            let mv: C64 = (0..Q).map(|j| v[j] * mf[i][j]).sum();
            mv.norm_sqr() / d[i] as f64
        })
        .sum();
    (w / nv).sqrt()
}

fn growth(z: C64) -> C64 {
    -z.ln()
}

/// Identifies and tracks the four hydrodynamic eigenvalues of `A(k)` over
/// ascending `kmags` along `direction`.
pub fn hydrodynamic_branches(
    c: &CollisionMatrix,
    m: &MomentMatrix,
    direction: [f64; 3],
    kmags: &[f64],
) -> Result<DispersionResult> {
    let dir = unit(direction)?;
    if kmags.is_empty() || !(kmags[0] > 0.0) || kmags.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "kmags",
            reason: "must be strictly ascending and positive".into(),
        });
    }
    let spectra: Vec<EigenDecomposition> = kmags
        .par_iter()
        .map(|&k| eigen(&build_amplification(c, m, dir.map(|d| d * k))))
        .collect::<Result<_>>()?;

    let mut gammas = Vec::with_capacity(kmags.len());
    let mut spectral_radius = Vec::with_capacity(kmags.len());
    let mut prev: Option<[C64; 4]> = None;
    for (i, spec) in spectra.iter().enumerate() {
        let kmag = kmags[i];
        spectral_radius.push(spec.values.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let picked: [usize; 4] = match prev {
            None => initial_branches(m, spec, kmag)?,
            Some(p) => track(spec, &p, kmags[i - 1], kmag)?,
        };
        let mut used = vec![false; spec.values.len()];
        for &p in &picked {
            used[p] = true;
        }
        for &p in &picked {
            let z = spec.values[p];
            if let Some(other) = (0..spec.values.len()).find(|&j| !used[j] && (spec.values[j] - z).norm() < TRACKING_TOLERANCE) {
                return Err(Error::BranchAmbiguity {
                    kmag,
                    detail: format!("eigenvalue {} lies within {TRACKING_TOLERANCE:e} of a tracked one {}", spec.values[other], z),
                });
            }
        }
        let g = picked.map(|p| growth(spec.values[p]));
        gammas.push(g);
        prev = Some(g);
    }
    Ok(DispersionResult { direction, kmags: kmags.to_vec(), gammas, spectral_radius })
}

fn initial_branches(m: &MomentMatrix, spec: &EigenDecomposition, kmag: f64) -> Result<[usize; 4]> {
    let mut order: Vec<(usize, f64)> = spec
        .vectors
        .iter()
        .enumerate()
        .filter(|(j, _)| spec.values[*j].re > 0.0)
        .map(|(j, v)| (j, conserved_overlap(m, v)))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    if order.len() < 4 {
        return Err(Error::BranchAmbiguity { kmag, detail: "fewer than four candidate eigenvalues".into() });
    }
    let mut four: Vec<usize> = order[..4].iter().map(|p| p.0).collect();
    // acoustic modes carry the two largest |Im Gamma|
    four.sort_by(|&a, &b| growth(spec.values[b]).im.abs().total_cmp(&growth(spec.values[a]).im.abs()));
    let (ac, sh) = four.split_at(2);
    let (g0, g1) = (growth(spec.values[ac[0]]), growth(spec.values[ac[1]]));
    if g0.im.abs() < TRACKING_TOLERANCE || g0.im.signum() == g1.im.signum() {
        return Err(Error::BranchAmbiguity { kmag, detail: "no conjugate acoustic pair among the conserved modes".into() });
    }
    let (plus, minus) = if g0.im > 0.0 { (ac[0], ac[1]) } else { (ac[1], ac[0]) };
    let (s1, s2) = if sh[0] < sh[1] { (sh[0], sh[1]) } else { (sh[1], sh[0]) };
    Ok([s1, s2, plus, minus])
}

fn track(spec: &EigenDecomposition, prev: &[C64; 4], k_prev: f64, k: f64) -> Result<[usize; 4]> {
    let r = k / k_prev;
    let mut used = vec![false; spec.values.len()];
    let mut out = [0usize; 4];
    for (b, g) in prev.iter().enumerate() {
        // attenuation ~ k^2, frequency ~ k
        let predicted = (-C64::new(g.re * r * r, g.im * r)).exp();
        let best = (0..spec.values.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &c| (spec.values[a] - predicted).norm().total_cmp(&(spec.values[c] - predicted).norm()))
            .ok_or_else(|| Error::BranchAmbiguity { kmag: k, detail: "no candidate left".into() })?;
        used[best] = true;
        out[b] = best;
    }
    Ok(out)
}

/// Largest backward error `||A v - z v||` over every eigenpair of `A(k)` along
/// `direction` at each of `kmags`.
pub fn max_backward_error(c: &CollisionMatrix, m: &MomentMatrix, direction: [f64; 3], kmags: &[f64]) -> Result<f64> {
    let dir = unit(direction)?;
    let worst = kmags
        .par_iter()
        .map(|&k| {
            let a = build_amplification(c, m, dir.map(|d| d * k));
            Ok(eigen(&a)?.residuals(&a).into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Largest `|z|` of `A(k)` over an `n^3` sample of `[0, pi]^3`, with the
/// wavevector where it occurs. Values above 1 mean linear instability.
pub fn max_amplification(params: &SchemeParameters, n: usize) -> Result<(f64, [f64; 3])> {
    let m = MomentMatrix::d3q27();
    let c = build_collision_matrix(m, params);
    let n = n.max(2);
    let grid: Vec<[f64; 3]> = (0..n * n * n)
        .map(|i| [i % n, (i / n) % n, i / (n * n)].map(|v| PI * v as f64 / (n - 1) as f64))
        .collect();
    let radii = grid
        .par_iter()
        .map(|k| Ok(eigenvalues(&build_amplification(&c, m, *k))?.iter().map(|z| z.norm()).fold(0.0, f64::max)))
        .collect::<Result<Vec<f64>>>()?;
    let (i, r) = radii.iter().enumerate().fold((0, 0.0), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    Ok((r, grid[i]))
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Coefficients of the target dispersion relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCoefficients {
    pub nu: f64,
    pub gamma: f64,
    pub c0: f64,
}

impl ReferenceCoefficients {
    pub fn from_params(p: &SchemeParameters) -> Result<Self> {
        let t = p.transport()?;
        Ok(Self { nu: t.nu, gamma: t.gamma, c0: p.equilibrium.c0 })
    }

    /// Target `Gamma` of a branch at `|k|`.
    pub fn target(&self, b: Branch, k: f64) -> C64 {
        match b {
            Branch::Shear1 | Branch::Shear2 => C64::new(self.nu * k * k, 0.0),
            Branch::AcousticPlus | Branch::AcousticMinus => {
                let im = self.c0 * k * (1.0 - self.gamma * self.gamma * k * k / (2.0 * self.c0 * self.c0));
                let sign = if b == Branch::AcousticPlus { 1.0 } else { -1.0 };
                C64::new(self.gamma * k * k, sign * im)
            }
        }
    }
}

/// One row of the dispersion table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionError {
    pub kmag: f64,
    pub branch: Branch,
    pub gamma: C64,
    pub reference: C64,
    pub err_re: f64,
    /// For acoustic branches, `|Im Gamma| - |Im reference|`.
    pub err_im: f64,
}

pub fn dispersion_errors(result: &DispersionResult, reference: &ReferenceCoefficients) -> Vec<DispersionError> {
    let mut out = Vec::with_capacity(result.kmags.len() * 4);
    for (i, &k) in result.kmags.iter().enumerate() {
        for b in Branch::ALL {
            let g = result.gamma(i, b);
            let r = reference.target(b, k);
            let err_im = if b.is_acoustic() { g.im.abs() - r.im.abs() } else { g.im - r.im };
            out.push(DispersionError { kmag: k, branch: b, gamma: g, reference: r, err_re: g.re - r.re, err_im });
        }
    }
    out
}

/// Error curves whose log-log slope is the order of accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCurve {
    Shear,
    AcousticRe,
    AcousticIm,
}

impl ErrorCurve {
    pub const ALL: [ErrorCurve; 3] = [ErrorCurve::Shear, ErrorCurve::AcousticRe, ErrorCurve::AcousticIm];

    pub fn name(self) -> &'static str {
        match self {
            ErrorCurve::Shear => "shear",
            ErrorCurve::AcousticRe => "acoustic_re",
            ErrorCurve::AcousticIm => "acoustic_im",
        }
    }

    pub fn extract(self, errors: &[DispersionError]) -> (Vec<f64>, Vec<f64>) {
        let (branch, imaginary) = match self {
            ErrorCurve::Shear => (Branch::Shear1, false),
            ErrorCurve::AcousticRe => (Branch::AcousticPlus, false),
            ErrorCurve::AcousticIm => (Branch::AcousticPlus, true),
        };
        errors
            .iter()
            .filter(|e| e.branch == branch)
            .map(|e| (e.kmag, if imaginary { e.err_im } else { e.err_re }))
            .unzip()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    pub branch: String,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the fit in natural-log units.
    pub residual: f64,
    pub window: [f64; 2],
    /// Points whose error was floored at 1e-300.
    pub floored: usize,
}

const ERROR_FLOOR: f64 = 1e-300;

/// Least-squares slope of `ln|error|` against `ln k` over `window` (inclusive).
pub fn fit_order(kmags: &[f64], errors: &[f64], window: (f64, f64)) -> Result<OrderFit> {
    if kmags.len() != errors.len() {
        return Err(Error::Fit(format!("{} wavenumbers but {} errors", kmags.len(), errors.len())));
    }
    let tol = 1e-12 * window.1.abs();
    let mut floored = 0;
    let pts: Vec<(f64, f64)> = kmags
        .iter()
        .zip(errors)
        .filter(|(k, _)| **k >= window.0 - tol && **k <= window.1 + tol)
        .map(|(k, e)| {
            let mut a = e.abs();
            if !(a >= f64::MIN_POSITIVE) {
                a = ERROR_FLOOR;
                floored += 1;
            }
            (k.ln(), a.ln())
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("{} points inside the window, at least 4 needed", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all wavenumbers coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(OrderFit { branch: String::new(), slope, intercept, residual, window: [window.0, window.1], floored })
}

/// Order fits for the three error curves.
pub fn fit_all(errors: &[DispersionError], window: (f64, f64)) -> Result<Vec<OrderFit>> {
    ErrorCurve::ALL
        .iter()
        .map(|c| {
            let (k, e) = c.extract(errors);
            let mut f = fit_order(&k, &e, window)?;
            f.branch = c.name().to_string();
            Ok(f)
        })
        .collect()
}

fn fmt_direction(d: [f64; 3]) -> String {
    d.iter().map(|v| fmt_f64_digits(*v, None)).collect::<Vec<_>>().join(" ")
}

pub fn write_dispersion_csv<W: Write>(out: W, direction: [f64; 3], errors: &[DispersionError], digits: Option<usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kmag", "direction", "branch", "re_gamma", "im_gamma", "ref_re", "ref_im", "err_re", "err_im"])?;
    let f = |x: f64| fmt_f64_digits(x, digits);
    let dir = fmt_direction(direction);
    for e in errors {
        w.write_record([
            f(e.kmag),
            dir.clone(),
            e.branch.name().to_string(),
            f(e.gamma.re),
            f(e.gamma.im),
            f(e.reference.re),
            f(e.reference.im),
            f(e.err_re),
            f(e.err_im),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DispersionRow<'a> {
    kmag: f64,
    direction: [f64; 3],
    branch: &'a str,
    re_gamma: f64,
    im_gamma: f64,
    ref_re: f64,
    ref_im: f64,
    err_re: f64,
    err_im: f64,
}

pub fn dispersion_json(direction: [f64; 3], errors: &[DispersionError]) -> serde_json::Value {
    let rows: Vec<DispersionRow> = errors
        .iter()
        .map(|e| DispersionRow {
            kmag: e.kmag,
            direction,
            branch: e.branch.name(),
            re_gamma: e.gamma.re,
            im_gamma: e.gamma.im,
            ref_re: e.reference.re,
            ref_im: e.reference.im,
            err_re: e.err_re,
            err_im: e.err_im,
        })
        .collect();
    serde_json::to_value(rows).expect("rows serialize")
}

/// Eigenvalue predicted for a mode of `k` on a periodic box, as `z = exp(-Gamma)`.
pub fn predicted_multiplier(params: &SchemeParameters, direction: [f64; 3], kmag: f64, branch: Branch) -> Result<C64> {
    let m = MomentMatrix::d3q27();
    let c = build_collision_matrix(m, params);
    let r = hydrodynamic_branches(&c, m, direction, &[kmag])?;
    Ok((-r.gamma(0, branch)).exp())
}

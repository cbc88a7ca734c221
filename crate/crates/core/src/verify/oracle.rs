//! Eigenvalues by an unrelated route: characteristic polynomial, then roots.

use num_complex::Complex64;
use num_traits::Zero;

use crate::spectral::CMatrix;

type C64 = Complex64;

/// Characteristic polynomial coefficients, leading first, by Faddeev-LeVerrier.
pub fn char_poly(a: &CMatrix) -> Vec<C64> {
    let n = a.dim();
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    let mut m = CMatrix::zeros(n);
    for k in 1..=n {
        let mut next = a.mul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        m = next;
        let am = a.mul(&m);
        let tr: C64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

fn horner(p: &[C64], z: C64) -> (C64, C64) {
    let mut v = C64::zero();
    let mut d = C64::zero();
    for c in p {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// Aberth iteration followed by Newton polishing.
pub fn poly_roots(p: &[C64]) -> Vec<C64> {
    let n = p.len() - 1;
    let radius = 1.0 + p.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = horner(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = horner(p, *zi);
            if d.norm() > 0.0 {
                *zi -= v / d;
            }
        }
    }
    z
}

/// Smallest possible worst-case distance over pairings of two multisets.
pub fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    fn go(a: &[C64], b: &[C64], used: &mut [bool], i: usize, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == a.len() {
            *best = worst;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, i + 1, worst.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

//! Roots of univariate complex polynomials (Aberth–Ehrlich iteration).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

const MAX_ITER: usize = 2000;

/// Evaluates `sum c[k] z^k` and its derivative.
fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    horner(coeffs, z).0
}

/// All roots of `sum c[k] z^k` (ascending coefficients), with multiplicity.
///
/// Leading coefficients below `1e-14` relative to the largest are treated as
/// zero, so the returned count is the numerical degree.
pub fn roots(coeffs: &[C64]) -> Vec<C64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].norm() <= 1e-14 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && coeffs[lo].norm() == 0.0 {
        lo += 1;
    }
    let mut out = vec![C64::new(0.0, 0.0); lo];
    let c: Vec<C64> = coeffs[lo..hi].iter().map(|x| x / coeffs[hi - 1]).collect();
    let n = c.len() - 1;
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(-c[0]);
        return out;
    }

    let radius = libm::pow(c[0].norm(), 1.0 / n as f64).max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    out.extend(z);
    out
}

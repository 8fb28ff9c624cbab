//! One-variable Fejér–Riesz factorization by root pairing.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::poly::{roots, AnalyticPoly, TrigPoly};

/// Roots within this relative distance of the circle are boundary roots.
pub const PAIRING_TOL: f64 = 1e-7;

/// Factors `t >= 0` on the circle as `|q|^2` with `q` outer and `q(0) >= 0`.
///
/// `degree` is the declared degree of the output (at least that of `t`).
pub fn scalar_fejer_riesz(t: &TrigPoly, degree: i32) -> Result<AnalyticPoly> {
    assert_eq!(t.nvars(), 1, "scalar factorization needs one variable");
    let box1 = MultiIndex::new(&[degree]);
    let n = t.degree().get(0);
    if n > degree {
        return Err(Error::DegreeTooHigh {
            var: 1,
            found: n,
            allowed: degree,
        });
    }
    if t.is_zero() {
        return Ok(AnalyticPoly::zero(box1));
    }
    let (min, _) = t.grid_range(1024);
    if min < -1e-10 * t.one_norm() {
        return Err(Error::NegativeInput { min });
    }
    if n == 0 {
        let c0 = t.coeff(&MultiIndex::new(&[0])).re.max(0.0);
        return Ok(AnalyticPoly::constant(box1, C64::new(libm::sqrt(c0), 0.0)));
    }

    // z^n t(z) has ascending coefficients t_{-n}, ..., t_n
    let laurent: Vec<C64> = (-n..=n).map(|k| t.coeff(&MultiIndex::new(&[k]))).collect();
    let all = roots::roots(&laurent);

    let mut chosen: Vec<C64> = Vec::with_capacity(n as usize);
    let mut boundary: Vec<C64> = Vec::new();
    for r in all {
        let m = r.norm();
        if m > 1.0 + PAIRING_TOL {
            chosen.push(r);
        } else if m >= 1.0 - PAIRING_TOL {
            boundary.push(r);
        }
    }
    // boundary roots come in (near-)coincident pairs; keep one per pair
    boundary.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let mut used = vec![false; boundary.len()];
    for i in 0..boundary.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (0..boundary.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (boundary[a] - boundary[i])
                    .norm()
                    .total_cmp(&(boundary[b] - boundary[i]).norm())
            });
        let merged = match partner {
            Some(j) => {
                used[j] = true;
                (boundary[i] + boundary[j]) * 0.5
            }
            None => boundary[i],
        };
        chosen.push(refine_double_root(&laurent, merged / merged.norm()));
    }

    let mut q = vec![C64::new(1.0, 0.0)];
    for r in &chosen {
        let mut next = vec![C64::new(0.0, 0.0); q.len() + 1];
        for (k, c) in q.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        q = next;
    }

    // scale by least squares over a circle grid
    let grid = 256;
    let (mut num, mut den) = (0.0, 0.0);
    for g in 0..grid {
        let th = 2.0 * core::f64::consts::PI * g as f64 / grid as f64;
        let w = roots::eval(&q, C64::from_polar(1.0, th)).norm_sqr();
        num += t.eval_angles(&[th]).value * w;
        den += w * w;
    }
    let mut scale = C64::new(libm::sqrt((num / den).max(0.0)), 0.0);
    if q[0].norm() > 0.0 {
        scale *= q[0].conj() / q[0].norm();
    }
    let terms = q
        .iter()
        .enumerate()
        .map(|(k, c)| (MultiIndex::new(&[k as i32]), c * scale));
    AnalyticPoly::from_terms(box1, terms)
}

/// Newton on the derivative: a double root of `f` is a simple root of `f'`.
fn refine_double_root(f: &[C64], z0: C64) -> C64 {
    let df: Vec<C64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let ddf: Vec<C64> = df
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let mut z = z0;
    for _ in 0..8 {
        let d = roots::eval(&ddf, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = roots::eval(&df, z) / d;
        if !(step.norm() < 1e-6) {
            break;
        }
        z -= step;
    }
    z / z.norm()
}

//! Primal-dual interior point method for `A(X) = b, X >= 0`, minimizing
//! `tr X`. Mehrotra predictor-corrector with the HKM direction.
//!
//! Constraints are made real (real and imaginary parts), then orthonormalized
//! through their Gram matrix, which drops the duplicate rows that Hermitian
//! symmetry produces and exposes an inconsistent right-hand side.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::psd::affine::AffineConstraintSystem;
use crate::psd::eigen::{hermitian_eigen, hermitize};

/// Largest number of real unknowns the dense method accepts.
pub(crate) const IPM_MAX_UNKNOWNS: usize = 1200;
const IPM_MAX_ITER: usize = 80;
const STEP_FRACTION: f64 = 0.98;
const ROW_TOL: f64 = 1e-11;
const REFINE_STEPS: usize = 4;

/// Orthonormal real constraint rows `B x = c` over the flattened blocks.
struct Reduced {
    b: DMatrix<f64>,
    c: DVector<f64>,
    /// Part of the target outside the row space, relative to the target.
    inconsistency: f64,
}

fn flat_len(sizes: &[usize]) -> usize {
    sizes.iter().map(|k| 2 * k * k).sum()
}

/// `(re, im)` of every entry, blocks in order, column-major within a block.
fn flatten(x: &[DMatrix<C64>], out: &mut [f64]) {
    let mut o = 0;
    for b in x {
        for v in b.iter() {
            out[o] = v.re;
            out[o + 1] = v.im;
            o += 2;
        }
    }
}

fn unflatten(v: &[f64], sizes: &[usize]) -> Vec<DMatrix<C64>> {
    let mut o = 0;
    sizes
        .iter()
        .map(|&k| {
            let m = DMatrix::from_fn(k, k, |i, j| {
                let p = o + 2 * (i + j * k);
                C64::new(v[p], v[p + 1])
            });
            o += 2 * k * k;
            m
        })
        .collect()
}

fn reduce(system: &AffineConstraintSystem) -> Reduced {
    let sizes = &system.block_sizes;
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, k| {
            let o = *acc;
            *acc += 2 * k * k;
            Some(o)
        })
        .collect();
    let n = flat_len(sizes);
    let m = 2 * system.len();
    let mut rows = DMatrix::<f64>::zeros(m, n);
    let mut rhs = DVector::<f64>::zeros(m);
    // Re(sum w X[r, c]) = tr(A X) with A the Hermitian part of W, W[c, r] = w;
    // the flattened dot product of A with a Hermitian X is exactly tr(A X).
    for (ci, con) in system.constraints.iter().enumerate() {
        for (part, rot) in [(0, C64::new(1.0, 0.0)), (1, C64::new(0.0, -1.0))] {
            let row = 2 * ci + part;
            for t in &con.terms {
                let w = t.coeff * rot * 0.5;
                let k = sizes[t.block];
                let p1 = offsets[t.block] + 2 * (t.col + t.row * k);
                let p2 = offsets[t.block] + 2 * (t.row + t.col * k);
                rows[(row, p1)] += w.re;
                rows[(row, p1 + 1)] += w.im;
                rows[(row, p2)] += w.re;
                rows[(row, p2 + 1)] -= w.im;
            }
            rhs[row] = (con.target * rot).re;
        }
    }
    let gram = &rows * rows.transpose();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > ROW_TOL * lmax).collect();
    let mut b = DMatrix::<f64>::zeros(keep.len(), n);
    let mut c = DVector::<f64>::zeros(keep.len());
    for (r, &i) in keep.iter().enumerate() {
        let q = eig.eigenvectors.column(i);
        let s = 1.0 / libm::sqrt(eig.eigenvalues[i]);
        let row = q.transpose() * &rows * s;
        b.row_mut(r).copy_from(&row);
        let qb = q.dot(&rhs);
        c[r] = qb * s;
    }
    let dropped: f64 = (0..m)
        .filter(|i| !keep.contains(i))
        .map(|i| {
            let v = eig.eigenvectors.column(i).dot(&rhs);
            v * v
        })
        .sum();
    let inconsistency = libm::sqrt(dropped) / (1.0 + rhs.norm());
    Reduced { b, c, inconsistency }
}

fn inner(a: &[DMatrix<C64>], b: &[DMatrix<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| u.re * v.re + u.im * v.im).sum::<f64>())
        .sum()
}

/// Largest `alpha` (capped at `cap`) with `X + alpha D` positive semidefinite.
fn max_step(x: &[DMatrix<C64>], d: &[DMatrix<C64>], cap: f64) -> f64 {
    let mut alpha = cap;
    for (xb, db) in x.iter().zip(d) {
        if xb.nrows() == 0 {
            continue;
        }
        let Some(ch) = xb.clone().cholesky() else {
            return 0.0;
        };
        let l = ch.l();
        let linv = l.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(l.nrows(), l.ncols()));
        let m = hermitize(&(&linv * db * linv.adjoint()));
        let (w, _) = hermitian_eigen(&m);
        if let Some(&lmin) = w.first() {
            if lmin < 0.0 {
                alpha = alpha.min(-1.0 / lmin);
            }
        }
    }
    alpha
}

pub(crate) struct IpmOutcome {
    pub x: Vec<DMatrix<C64>>,
    pub violation: f64,
    pub iterations: usize,
}

/// Runs until the PSD iterate meets `tol` on `system` or progress stops;
/// either way returns the last iterate. `None` when the system is too large
/// or its right-hand side is inconsistent.
pub(crate) fn interior_point(system: &AffineConstraintSystem, tol: f64, max_iter: usize) -> Option<IpmOutcome> {
    let sizes = system.block_sizes.clone();
    let n = flat_len(&sizes);
    if n == 0 || n / 2 > IPM_MAX_UNKNOWNS || system.is_empty() {
        return None;
    }
    let red = reduce(system);
    if red.inconsistency > 1e-9 {
        return None;
    }
    let m = red.b.nrows();
    let dim: usize = sizes.iter().sum();
    let eye: Vec<DMatrix<C64>> = sizes.iter().map(|&k| DMatrix::identity(k, k)).collect();
    let apply = |x: &[DMatrix<C64>]| -> DVector<f64> {
        let mut f = vec![0.0; n];
        flatten(x, &mut f);
        &red.b * DVector::from_vec(f)
    };
    let adjoint = |y: &DVector<f64>| -> Vec<DMatrix<C64>> {
        let v = red.b.transpose() * y;
        unflatten(v.as_slice(), &sizes).iter().map(hermitize).collect()
    };
    let scale = |x: &[DMatrix<C64>], s: f64| -> Vec<DMatrix<C64>> { x.iter().map(|b| b * C64::new(s, 0.0)).collect() };
    let axpy = |x: &[DMatrix<C64>], s: f64, d: &[DMatrix<C64>]| -> Vec<DMatrix<C64>> {
        x.iter().zip(d).map(|(a, b)| a + b * C64::new(s, 0.0)).collect()
    };

    let cmax = red.c.amax();
    let xi = 10.0 * if cmax > 0.0 { cmax } else { 1.0 };
    let mut x = scale(&eye, xi);
    let mut z = scale(&eye, 10.0);
    let mut y = DVector::<f64>::zeros(m);
    let mut best: Option<IpmOutcome> = None;
    let mut stall = 0;

    for iter in 1..=max_iter.min(IPM_MAX_ITER) {
        let violation = system.scaled_violation(&x);
        if !violation.is_finite() {
            break;
        }
        let better = best.as_ref().is_none_or(|b| violation < b.violation);
        if better {
            best = Some(IpmOutcome {
                x: x.clone(),
                violation,
                iterations: iter,
            });
            stall = 0;
        } else {
            stall += 1;
        }
        if violation <= tol || stall >= 8 {
            break;
        }
        let rp = &red.c - apply(&x);
        let aty = adjoint(&y);
        let rd: Vec<DMatrix<C64>> = eye.iter().zip(&z).zip(&aty).map(|((c, zb), ab)| c - zb - ab).collect();
        let mu = inner(&x, &z) / dim as f64;

        let mut zinv = Vec::with_capacity(sizes.len());
        for zb in &z {
            match zb.clone().cholesky() {
                Some(ch) => zinv.push(hermitize(&ch.inverse())),
                None => return best,
            }
        }
        // Schur complement M_ij = <A_i, X A_j Z^-1>
        let mut cols = DMatrix::<f64>::zeros(n, m);
        let mut f = vec![0.0; n];
        for j in 0..m {
            let aj = unflatten(red.b.row(j).transpose().as_slice(), &sizes);
            let w: Vec<DMatrix<C64>> = aj
                .iter()
                .zip(&x)
                .zip(&zinv)
                .map(|((a, xb), zi)| hermitize(&(xb * hermitize(a) * zi)))
                .collect();
            flatten(&w, &mut f);
            cols.column_mut(j).copy_from_slice(&f);
        }
        let mut schur = &red.b * cols;
        schur = (&schur + schur.transpose()) * 0.5;
        let ridge = 1e-14 * schur.diagonal().amax().max(1e-300);
        for i in 0..m {
            schur[(i, i)] += ridge;
        }
        let Some(chol) = schur.cholesky() else {
            return best;
        };

        let direction = |rc: &[DMatrix<C64>]| -> (DVector<f64>, Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
            // dX = Rc Z^-1 - X dZ Z^-1, dZ = Rd - A^T dy
            let base: Vec<DMatrix<C64>> = rc
                .iter()
                .zip(&x)
                .zip(&rd)
                .zip(&zinv)
                .map(|(((r, xb), d), zi)| (r - xb * d) * zi)
                .collect();
            let rhs = &rp - apply(&base.iter().map(hermitize).collect::<Vec<_>>());
            let build = |dy: &DVector<f64>| {
                let atdy = adjoint(dy);
                let dz: Vec<DMatrix<C64>> = rd.iter().zip(&atdy).map(|(d, a)| d - a).collect();
                let dx: Vec<DMatrix<C64>> = rc
                    .iter()
                    .zip(&x)
                    .zip(&dz)
                    .zip(&zinv)
                    .map(|(((r, xb), d), zi)| hermitize(&((r - xb * d) * zi)))
                    .collect();
                (dx, dz)
            };
            let mut dy = chol.solve(&rhs);
            let (mut dx, mut dz) = build(&dy);
            // iterative refinement against the exact operator
            let mut err = &rp - apply(&dx);
            for _ in 0..REFINE_STEPS {
                let fix = chol.solve(&err);
                let dy2 = &dy + fix;
                let (dx2, dz2) = build(&dy2);
                let err2 = &rp - apply(&dx2);
                if err2.norm() >= err.norm() {
                    break;
                }
                (dy, dx, dz, err) = (dy2, dx2, dz2, err2);
            }
            // rows are orthonormal, so this lands B dX on rp exactly
            let dx = axpy(&dx, 1.0, &adjoint(&err));
            (dy, dx, dz)
        };

        let xz: Vec<DMatrix<C64>> = x.iter().zip(&z).map(|(a, b)| a * b).collect();
        let rc_aff: Vec<DMatrix<C64>> = xz.iter().map(|p| -p).collect();
        let (_, dxa, dza) = direction(&rc_aff);
        let ap = max_step(&x, &dxa, 1.0);
        let ad = max_step(&z, &dza, 1.0);
        let mu_aff = inner(&axpy(&x, ap, &dxa), &axpy(&z, ad, &dza)) / dim as f64;
        let ratio = (mu_aff / mu).clamp(0.0, 1.0);
        let sigma = ratio * ratio * ratio;
        let rc: Vec<DMatrix<C64>> = xz
            .iter()
            .zip(&eye)
            .zip(dxa.iter().zip(&dza))
            .map(|((p, i), (a, b))| i * C64::new(sigma * mu, 0.0) - p - a * b)
            .collect();
        let (dy, dx, dz) = direction(&rc);
        let ap = (STEP_FRACTION * max_step(&x, &dx, 1.0 / STEP_FRACTION)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&z, &dz, 1.0 / STEP_FRACTION)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        x = axpy(&x, ap, &dx);
        z = axpy(&z, ad, &dz);
        y += dy * ad;
    }
    best
}

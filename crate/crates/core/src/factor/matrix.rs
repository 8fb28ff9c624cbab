//! Matrix Fejér–Riesz factorization by the Bauer method.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::psd::{hermitian_eigen, hermitize, max_abs};

/// First convergence checkpoint of the Bauer window.
pub const BAUER_START: usize = 32;
/// Largest Bauer window before giving up.
pub const BAUER_MAX: usize = 1024;
/// Iterates closer than this (relative) count as converged.
pub const BAUER_TOL: f64 = 1e-10;
/// Relative diagonal shift used for boundary-degenerate inputs.
pub const BOUNDARY_SHIFT: f64 = 1e-9;

/// `T(z) = sum_j T_j z^j` with `T_{-j} = T_j^*`; Hermitian on the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTrigPoly {
    size: usize,
    coeffs: BTreeMap<i32, DMatrix<C64>>,
}

impl MatrixTrigPoly {
    pub fn new(size: usize, coeffs: BTreeMap<i32, DMatrix<C64>>) -> Self {
        for m in coeffs.values() {
            assert!(m.nrows() == size && m.ncols() == size);
        }
        let mut t = Self { size, coeffs };
        t.symmetrize();
        t
    }

    pub fn constant(m: DMatrix<C64>) -> Self {
        let size = m.nrows();
        Self::new(size, [(0, m)].into_iter().collect())
    }

    /// Enforces `T_{-j} = T_j^*` by averaging.
    pub fn symmetrize(&mut self) {
        let keys: Vec<i32> = self.coeffs.keys().copied().collect();
        let zero = DMatrix::zeros(self.size, self.size);
        let mut out = BTreeMap::new();
        for &j in keys.iter().chain(keys.iter().map(|j| -j).collect::<Vec<_>>().iter()) {
            let a = self.coeffs.get(&j).unwrap_or(&zero);
            let b = self.coeffs.get(&-j).unwrap_or(&zero);
            out.insert(j, (a + b.adjoint()) * C64::new(0.5, 0.0));
        }
        self.coeffs = out;
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, m)| max_abs(m) > 0.0)
            .map(|(j, _)| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coeff(&self, j: i32) -> DMatrix<C64> {
        self.coeffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(self.size, self.size))
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, DMatrix<C64>> {
        &self.coeffs
    }

    pub fn eval_angle(&self, theta: f64) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.size, self.size);
        for (j, m) in &self.coeffs {
            out += m * C64::from_polar(1.0, *j as f64 * theta);
        }
        hermitize(&out)
    }

    /// Coefficient-wise sup distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|j| max_abs(&(self.coeff(*j) - other.coeff(*j))))
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient norms; bounds the spectral norm on the circle.
    pub fn scale(&self) -> f64 {
        self.coeffs.values().map(|m| m.norm()).sum()
    }

    /// Max over a uniform grid of the spectral norm of `T(z) - other(z)`.
    pub fn sup_distance(&self, other: &Self, grid: usize) -> f64 {
        (0..grid)
            .map(|g| {
                let th = 2.0 * core::f64::consts::PI * g as f64 / grid as f64;
                let d = self.eval_angle(th) - other.eval_angle(th);
                let (w, _) = hermitian_eigen(&d);
                w.iter().map(|x| x.abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over a uniform grid and the angle where it occurs.
    pub fn grid_min_eigenvalue(&self, grid: usize) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for g in 0..grid {
            let th = 2.0 * core::f64::consts::PI * g as f64 / grid as f64;
            let (w, _) = hermitian_eigen(&self.eval_angle(th));
            if w[0] < best.0 {
                best = (w[0], th);
            }
        }
        best
    }

    fn shifted(&self, eps: f64) -> Self {
        let mut t = self.clone();
        let c0 = t.coeff(0) + DMatrix::identity(self.size, self.size) * C64::new(eps, 0.0);
        t.coeffs.insert(0, c0);
        t
    }
}

/// `A(z) = sum_{k=0}^{degree} A_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    coeffs: Vec<DMatrix<C64>>,
}

impl MatrixPoly {
    pub fn new(coeffs: Vec<DMatrix<C64>>) -> Self {
        assert!(!coeffs.is_empty());
        let k = coeffs[0].nrows();
        assert!(coeffs.iter().all(|m| m.nrows() == k && m.ncols() == k));
        Self { coeffs }
    }

    pub fn size(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Declared degree (number of stored coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[DMatrix<C64>] {
        &self.coeffs
    }

    pub fn eval(&self, z: C64) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.size(), self.size());
        for m in self.coeffs.iter().rev() {
            out = out * z + m;
        }
        out
    }

    /// `A(z)^* A(z)` on the circle as a matrix trigonometric polynomial.
    pub fn gram(&self) -> MatrixTrigPoly {
        let n = self.coeffs.len() as i32;
        let mut coeffs = BTreeMap::new();
        for j in -(n - 1)..n {
            let mut acc = DMatrix::zeros(self.size(), self.size());
            for k in 0..n {
                let l = k + j;
                if l >= 0 && l < n {
                    acc += self.coeffs[k as usize].adjoint() * &self.coeffs[l as usize];
                }
            }
            coeffs.insert(j, acc);
        }
        MatrixTrigPoly::new(self.size(), coeffs)
    }
}

/// Result of a matrix spectral factorization.
#[derive(Clone, Debug)]
pub struct MatrixFactorization {
    pub factor: MatrixPoly,
    /// Diagonal shift applied before factoring (0 when none was needed).
    pub shift: f64,
    /// Bauer window at which the iterates converged.
    pub window: usize,
    /// Coefficient-wise sup of `A^* A - T`.
    pub residual: f64,
}

/// Factors `T = A^* A` on the circle with `deg A <= deg T`.
///
/// `A` is outer and gauge-fixed: `A_0` is upper triangular with a positive
/// diagonal. Inputs that are singular on the circle are factored after a
/// diagonal shift of `BOUNDARY_SHIFT * scale(T)`, which is reported.
pub fn matrix_fejer_riesz(t: &MatrixTrigPoly) -> Result<MatrixFactorization> {
    let scale = t.scale();
    let k = t.size();
    if scale == 0.0 {
        return Ok(MatrixFactorization {
            factor: MatrixPoly::new(vec![DMatrix::zeros(k, k)]),
            shift: 0.0,
            window: 0,
            residual: 0.0,
        });
    }
    let grid = (64 * (t.degree() + 1)).max(256);
    let (min_eig, angle) = t.grid_min_eigenvalue(grid);
    if min_eig < -1e-9 * scale {
        return Err(Error::NotPsd {
            angle,
            eigenvalue: min_eig,
        });
    }
    let (start, shift) = match bauer(t) {
        Ok(it) => (it, 0.0),
        Err(_) => {
            let eps = BOUNDARY_SHIFT * scale;
            (bauer(&t.shifted(eps))?, eps)
        }
    };
    let target = if shift > 0.0 { t.shifted(shift) } else { t.clone() };
    let factor = gauge_fix(newton_refine(start.factor, &target));
    let refined = factor.gram().distance(&target);
    if refined > NEWTON_TOL * scale.max(1.0) {
        return Err(Error::NoConvergence {
            window: start.window,
            change: if start.converged { refined } else { start.change },
        });
    }
    let residual = factor.gram().distance(t);
    Ok(MatrixFactorization {
        factor,
        shift,
        window: start.window,
        residual,
    })
}

/// Accepted coefficient residual (relative) after Newton refinement.
const NEWTON_TOL: f64 = 1e-11;
const NEWTON_STEPS: usize = 30;

struct BauerIterate {
    factor: MatrixPoly,
    window: usize,
    converged: bool,
    change: f64,
}

/// `sum_l A_l^* D_{l+j} + D_l^* A_{l+j}` for `j = 0..=n`: the derivative of
/// `A -> A^* A` in direction `D`, nonnegative coefficients only.
fn gram_derivative(a: &[DMatrix<C64>], d: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
    let n = a.len();
    (0..n)
        .map(|j| {
            let mut acc = DMatrix::zeros(a[0].nrows(), a[0].ncols());
            for l in 0..n - j {
                acc += a[l].adjoint() * &d[l + j] + d[l].adjoint() * &a[l + j];
            }
            acc
        })
        .collect()
}

/// Newton iteration on the coefficient equations `(A^* A)_j = T_j`, each
/// step solved in the least-squares minimal-norm sense (the left-unitary
/// gauge makes the Jacobian rank deficient).
fn newton_refine(mut a: MatrixPoly, t: &MatrixTrigPoly) -> MatrixPoly {
    let n = a.coeffs.len();
    let k = a.size();
    let per = k * k;
    let dim = 2 * n * per;
    let scale = t.scale().max(1.0);
    let pack = |ms: &[DMatrix<C64>]| -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        for (b, m) in ms.iter().enumerate() {
            for (e, c) in m.iter().enumerate() {
                v[2 * (b * per + e)] = c.re;
                v[2 * (b * per + e) + 1] = c.im;
            }
        }
        v
    };
    let residual = |a: &MatrixPoly| -> Vec<DMatrix<C64>> {
        let g = a.gram();
        (0..n as i32).map(|j| t.coeff(j) - g.coeff(j)).collect()
    };
    let mut r = residual(&a);
    let mut rnorm = r.iter().map(max_abs).fold(0.0, f64::max);
    for _ in 0..NEWTON_STEPS {
        if rnorm <= 1e-15 * scale {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        let mut unit: Vec<DMatrix<C64>> = (0..n).map(|_| DMatrix::zeros(k, k)).collect();
        for col in 0..dim {
            let (b, rest) = (col / (2 * per), col % (2 * per));
            let e = rest / 2;
            let val = if rest % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            unit[b][e] = val;
            jac.set_column(col, &pack(&gram_derivative(&a.coeffs, &unit)));
            unit[b][e] = C64::new(0.0, 0.0);
        }
        let step = match jac.svd(true, true).solve(&pack(&r), 1e-13 * scale) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut trial = a.clone();
        for (b, m) in trial.coeffs.iter_mut().enumerate() {
            for e in 0..per {
                let i = 2 * (b * per + e);
                m[e] += C64::new(step[i], step[i + 1]);
            }
        }
        let rt = residual(&trial);
        let rtn = rt.iter().map(max_abs).fold(0.0, f64::max);
        if !(rtn < rnorm) {
            break;
        }
        a = trial;
        r = rt;
        rnorm = rtn;
    }
    a
}

/// Left-multiplies by a unitary so that `A_0` is upper triangular with a
/// nonnegative real diagonal.
fn gauge_fix(a: MatrixPoly) -> MatrixPoly {
    let qr = a.coeffs[0].clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let k = a.size();
    let phase = DMatrix::from_fn(k, k, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if r[(i, i)].norm() > 0.0 {
            r[(i, i)].conj() / r[(i, i)].norm()
        } else {
            C64::new(1.0, 0.0)
        }
    });
    let u = phase * q.adjoint();
    MatrixPoly::new(a.coeffs.iter().map(|m| &u * m).collect())
}

/// Banded block Cholesky of the block Toeplitz matrix `[T_{j-i}]`, run row
/// by row; the trailing row converges to the conjugated spectral factor.
fn bauer(t: &MatrixTrigPoly) -> Result<BauerIterate> {
    let n = t.degree();
    let k = t.size();
    let blocks: Vec<DMatrix<C64>> = (0..=n as i32).map(|j| t.coeff(-j)).collect();
    let t0 = t.coeff(0);
    // rows[r][l] = L_{i, i - n + l}, most recent row last
    let mut rows: VecDeque<Vec<DMatrix<C64>>> = VecDeque::new();
    let mut prev_checkpoint: Option<MatrixPoly> = None;
    let mut checkpoint = BAUER_START / 2;
    let mut last_change;
    let zero = DMatrix::<C64>::zeros(k, k);

    for i in 0usize.. {
        let mut row: Vec<DMatrix<C64>> = vec![zero.clone(); n + 1];
        let first = i.saturating_sub(n);
        for j in first..i {
            // block (i, j) of the Toeplitz matrix is T_{j - i}
            let mut s = blocks[i - j].clone();
            let lj = &rows[rows.len() - (i - j)];
            for l in first.max(j.saturating_sub(n))..j {
                s -= &row[l + n - i] * lj[l + n - j].adjoint();
            }
            let ljj = &lj[n];
            let x = ljj
                .solve_lower_triangular(&s.adjoint())
                .ok_or(Error::NoConvergence {
                    window: i,
                    change: f64::NAN,
                })?;
            row[j + n - i] = x.adjoint();
        }
        let mut d = t0.clone();
        for l in first..i {
            let b = &row[l + n - i];
            d -= b * b.adjoint();
        }
        let chol = Cholesky::new(hermitize(&d)).ok_or(Error::NoConvergence {
            window: i,
            change: f64::NAN,
        })?;
        row[n] = chol.l();
        rows.push_back(row);
        if rows.len() > n + 1 {
            rows.pop_front();
        }

        if i == checkpoint + n {
            let current = row_to_factor(rows.back().unwrap(), n);
            if let Some(prev) = &prev_checkpoint {
                let scale = current.coeffs.iter().map(max_abs).fold(1.0, f64::max);
                last_change = current
                    .coeffs
                    .iter()
                    .zip(&prev.coeffs)
                    .map(|(a, b)| max_abs(&(a - b)))
                    .fold(0.0, f64::max)
                    / scale;
                if last_change < BAUER_TOL || checkpoint >= BAUER_MAX {
                    return Ok(BauerIterate {
                        factor: current,
                        window: checkpoint,
                        converged: last_change < BAUER_TOL,
                        change: last_change,
                    });
                }
            }
            prev_checkpoint = Some(current);
            checkpoint *= 2;
        }
    }
    unreachable!()
}

/// `A_k = L_{i, i-k}^*`, with rows of a short prefix padded by zeros.
fn row_to_factor(row: &[DMatrix<C64>], n: usize) -> MatrixPoly {
    MatrixPoly::new((0..=n).map(|k| row[n - k].adjoint()).collect())
}

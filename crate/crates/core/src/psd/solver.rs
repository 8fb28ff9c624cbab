//! Feasibility search: find PSD blocks satisfying an affine system.
//!
//! Dykstra's alternating projections between the affine subspace and the
//! product of PSD cones, with periodic face polishing: once the iterate is
//! close, its numerical range is frozen and the affine system is solved
//! exactly (least squares by CGLS) inside that face.


use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::index::MultiIndex;
use crate::psd::affine::{AffineConstraintSystem, AffineProjector};
use crate::psd::eigen::{hermitian_eigen, hermitize, project_psd, reconstruct};
use crate::psd::ipm::interior_point;
use crate::psd::GramCertificate;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Success threshold on the scaled affine violation of a PSD iterate.
    pub tol: f64,
    pub max_iter: usize,
    /// Attempt a face polish every this many iterations (0 disables).
    pub polish_every: usize,
    /// Only polish once the violation is below this.
    pub polish_start: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50_000,
            polish_every: 25,
            polish_start: 1e-3,
        }
    }
}

/// Outcome details of a solve. For failures this is evidence, never proof:
/// the solver does not certify infeasibility.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub residual: f64,
    pub iterations: usize,
    /// `(iteration, residual)` samples.
    pub trace: Vec<(usize, f64)>,
    pub polished: bool,
}

/// Monomial basis of one Gram block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockBasis {
    pub nvars: usize,
    pub basis: Vec<MultiIndex>,
}

pub struct Solution {
    pub blocks: Vec<GramCertificate>,
    pub evidence: Evidence,
}

/// Finds PSD blocks with `A(X) = b`, or returns the best evidence found.
pub fn solve_feasibility(
    system: &AffineConstraintSystem,
    blocks: &[BlockBasis],
    opts: &SolverOptions,
) -> Result<Solution, Evidence> {
    assert_eq!(system.block_sizes.len(), blocks.len());
    for (n, b) in system.block_sizes.iter().zip(blocks) {
        assert_eq!(*n, b.basis.len(), "block size does not match its basis");
    }
    let mut trace = Vec::new();
    if let Some(out) = interior_point(system, opts.tol * IPM_OVERSHOOT, opts.max_iter) {
        trace.push((out.iterations, out.violation));
        let accept = opts.tol * STALL_ACCEPT;
        let polished = if out.violation <= opts.tol {
            Some((out.x, out.violation))
        } else if out.violation <= FACTOR_POLISH_START {
            factor_polish(system, &out.x, opts.tol, accept)
                .or_else(|| (out.violation <= accept).then_some((out.x, out.violation)))
        } else {
            None
        };
        if let Some((x, residual)) = polished {
            let blocks = x
                .into_iter()
                .zip(blocks)
                .map(|(m, b)| GramCertificate::new(b.nvars, b.basis.clone(), hermitize(&m)))
                .collect();
            return Ok(Solution {
                blocks,
                evidence: Evidence {
                    residual,
                    iterations: out.iterations,
                    trace,
                    polished: true,
                },
            });
        }
    }
    let projector = AffineProjector::new(system);
    let mut x = system.zero_blocks();
    let mut incr = system.zero_blocks();
    let mut best = f64::INFINITY;

    let finish = |x: Vec<DMatrix<C64>>, evidence: Evidence| {
        let blocks = x
            .into_iter()
            .zip(blocks)
            .map(|(m, b)| GramCertificate::new(b.nvars, b.basis.clone(), hermitize(&m)))
            .collect();
        Solution { blocks, evidence }
    };

    for iter in 1..=opts.max_iter {
        let mut y = x.clone();
        projector.project(&mut y);
        for b in 0..x.len() {
            let z = &y[b] + &incr[b];
            let (p, _) = project_psd(&z);
            incr[b] = z - &p;
            x[b] = p;
        }
        let res = system.scaled_violation(&x);
        best = best.min(res);
        if iter == 1 || iter % 100 == 0 {
            trace.push((iter, res));
        }
        if res <= opts.tol {
            trace.push((iter, res));
            return Ok(finish(
                x,
                Evidence {
                    residual: res,
                    iterations: iter,
                    trace,
                    polished: false,
                },
            ));
        }
        let polish_now = opts.polish_every > 0
            && res <= FACTOR_POLISH_START
            && (iter % opts.polish_every == 0 || iter == opts.max_iter);
        if polish_now {
            let face = if res <= opts.polish_start { polish(system, &x, opts.tol) } else { None };
            let polished = face.or_else(|| {
                let due = (iter / opts.polish_every) % FACTOR_POLISH_EVERY == 1;
                if due {
                    factor_polish(system, &x, opts.tol, opts.tol * STALL_ACCEPT)
                } else {
                    None
                }
            });
            if let Some((xp, pres)) = polished {
                trace.push((iter, pres));
                return Ok(finish(
                    xp,
                    Evidence {
                        residual: pres,
                        iterations: iter,
                        trace,
                        polished: true,
                    },
                ));
            }
        }
    }
    Err(Evidence {
        residual: best,
        iterations: opts.max_iter,
        trace,
        polished: false,
    })
}

/// Factor polish runs on every this many face polish attempts.
const FACTOR_POLISH_EVERY: usize = 8;
/// Factor polish starts below this violation.
const FACTOR_POLISH_START: f64 = 0.05;
/// The interior point method aims this far below `tol` before it stalls out.
const IPM_OVERSHOOT: f64 = 1e-3;
/// Iterates that stall short of `tol` are still accepted up to this many times `tol`.
const STALL_ACCEPT: f64 = 100.0;

/// Face polish: keep each block's dominant eigenvectors `V`, then solve
/// `A(V S V^*) = b` for `S` by minimal-norm least squares.
fn polish(
    system: &AffineConstraintSystem,
    x: &[DMatrix<C64>],
    tol: f64,
) -> Option<(Vec<DMatrix<C64>>, f64)> {
    let eigs: Vec<(Vec<f64>, DMatrix<C64>)> = x.iter().map(hermitian_eigen).collect();
    let lmax = eigs
        .iter()
        .filter_map(|(w, _)| w.last().copied())
        .fold(0.0, f64::max);
    if lmax <= 0.0 {
        return None;
    }
    for rel in [1e-10, 1e-8, 1e-6, 1e-4] {
        let faces: Vec<(DMatrix<C64>, DMatrix<C64>)> = eigs
            .iter()
            .map(|(w, v)| {
                let keep: Vec<usize> = (0..w.len()).filter(|&k| w[k] > rel * lmax).collect();
                let basis = DMatrix::from_fn(v.nrows(), keep.len(), |r, c| v[(r, keep[c])]);
                let s0 = DMatrix::from_fn(keep.len(), keep.len(), |r, c| {
                    if r == c {
                        C64::new(w[keep[r]], 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                (basis, s0)
            })
            .collect();
        let lift = |s: &[DMatrix<C64>]| -> Vec<DMatrix<C64>> {
            s.iter()
                .zip(&faces)
                .map(|(s, (v, _))| v * s * v.adjoint())
                .collect()
        };
        let s0: Vec<DMatrix<C64>> = faces.iter().map(|(_, s)| s.clone()).collect();
        let rhs: Vec<C64> = system.residual(&lift(&s0)).iter().map(|r| -r).collect();
        let delta = cgls(system, &faces, &rhs, &lift);
        let mut out = Vec::with_capacity(x.len());
        let mut ok = true;
        for ((s, d), (v, _)) in s0.iter().zip(&delta).zip(&faces) {
            let s = hermitize(&(s + d));
            let (w, u) = hermitian_eigen(&s);
            let top = w.last().copied().unwrap_or(0.0);
            if w.first().is_some_and(|&m| m < -1e-12 * top.max(1.0)) {
                ok = false;
                break;
            }
            let clipped: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
            let s = reconstruct(&clipped, &u);
            out.push(hermitize(&(v * s * v.adjoint())));
        }
        if !ok {
            continue;
        }
        let res = system.scaled_violation(&out);
        if res <= tol {
            return Some((out, res));
        }
    }
    None
}

/// Factor polish: write each block as `R R^*` and run Gauss-Newton on
/// `|A(R R^*) - b|^2`, each step the minimal-norm solution of the
/// linearization `A(D R^* + R D^*) = b - A(R R^*)`. Iterates are PSD by
/// construction, so thin feasible sets are reached without eigenvalue
/// clipping.
fn factor_polish(
    system: &AffineConstraintSystem,
    x: &[DMatrix<C64>],
    tol: f64,
    accept: f64,
) -> Option<(Vec<DMatrix<C64>>, f64)> {
    let eigs: Vec<(Vec<f64>, DMatrix<C64>)> = x.iter().map(hermitian_eigen).collect();
    let mut starts: Vec<(f64, Vec<DMatrix<C64>>)> = Vec::new();
    let mut tried: Vec<Vec<usize>> = Vec::new();
    for rel in GN_RANK_CUTS {
        let r: Vec<DMatrix<C64>> = eigs
            .iter()
            .map(|(w, v)| {
                let top = w.last().copied().unwrap_or(0.0);
                let keep: Vec<usize> = (0..w.len()).filter(|&k| w[k] > rel * top).collect();
                DMatrix::from_fn(v.nrows(), keep.len().max(1), |i, c| {
                    keep.get(c)
                        .map_or(C64::new(0.0, 0.0), |&k| v[(i, k)] * libm::sqrt(w[k].max(0.0)))
                })
            })
            .collect();
        let ranks: Vec<usize> = r.iter().map(|f| f.ncols()).collect();
        if tried.contains(&ranks) {
            continue;
        }
        tried.push(ranks);
        let xr: Vec<DMatrix<C64>> = r.iter().map(|f| hermitize(&(f * f.adjoint()))).collect();
        starts.push((system.scaled_violation(&xr), r));
    }
    // closest truncation first
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(Vec<DMatrix<C64>>, f64)> = None;
    for (_, r) in starts {
        let (xr, viol) = gauss_newton(system, r, tol);
        if viol <= tol {
            return Some((xr, viol));
        }
        if best.as_ref().is_none_or(|b| viol < b.1) {
            best = Some((xr, viol));
        }
        if best.as_ref().is_some_and(|b| b.1 <= accept) {
            break;
        }
    }
    best.filter(|b| b.1 <= accept)
}

/// Returns the final iterate and its violation, stopping early at `tol` or
/// once progress stalls.
fn gauss_newton(system: &AffineConstraintSystem, mut r: Vec<DMatrix<C64>>, tol: f64) -> (Vec<DMatrix<C64>>, f64) {
    let gram = |r: &[DMatrix<C64>]| -> Vec<DMatrix<C64>> {
        r.iter().map(|f| hermitize(&(f * f.adjoint()))).collect()
    };
    let rnorm = |res: &[C64]| libm::sqrt(res.iter().map(|c| c.norm_sqr()).sum::<f64>());
    let mut res = system.residual(&gram(&r));
    let mut cur = rnorm(&res);
    let mut last = f64::INFINITY;
    let mut slow = 0;
    for _ in 0..GN_STEPS {
        let xr = gram(&r);
        let viol = system.scaled_violation(&xr);
        if viol <= tol {
            return (xr, viol);
        }
        slow = if viol > GN_SLOW * last { slow + 1 } else { 0 };
        if slow >= GN_PATIENCE {
            return (xr, viol);
        }
        last = viol;
        let rhs: Vec<C64> = res.iter().map(|c| -c).collect();
        let step = dense_step(system, &r, &rhs).unwrap_or_else(|| cgls_real(system, &r, &rhs));
        // backtrack on the residual norm
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial: Vec<DMatrix<C64>> = r
                .iter()
                .zip(&step)
                .map(|(f, d)| f + d * C64::new(alpha, 0.0))
                .collect();
            let tres = system.residual(&gram(&trial));
            let tn = rnorm(&tres);
            if tn < cur {
                r = trial;
                res = tres;
                cur = tn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let xr = gram(&r);
    let viol = system.scaled_violation(&xr);
    (xr, viol)
}

const GN_STEPS: usize = 40;
/// A step that keeps more than this fraction of the violation counts as slow.
const GN_SLOW: f64 = 0.9;
/// Consecutive slow steps before Gauss-Newton gives up.
const GN_PATIENCE: usize = 3;
/// Relative eigenvalue cuts tried for the factor rank. Full rank makes the
/// Jacobian singular at thin solutions, so truncated ranks come first.
const GN_RANK_CUTS: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-6, 0.0];

/// Largest real unknown count solved densely in a Gauss-Newton step.
const DENSE_GN_MAX: usize = 1600;

/// Same least-squares problem as [`cgls_real`], solved exactly by SVD.
fn dense_step(
    system: &AffineConstraintSystem,
    r: &[DMatrix<C64>],
    rhs: &[C64],
) -> Option<Vec<DMatrix<C64>>> {
    let cols: usize = r.iter().map(|f| 2 * f.len()).sum();
    if cols > DENSE_GN_MAX {
        return None;
    }
    let rows = 2 * system.len();
    let mut jac = DMatrix::<f64>::zeros(rows, cols);
    let mut col = 0;
    let mut unit: Vec<DMatrix<C64>> = r.iter().map(|f| DMatrix::zeros(f.nrows(), f.ncols())).collect();
    for b in 0..r.len() {
        for e in 0..r[b].len() {
            for val in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                unit[b][e] = val;
                let m = &unit[b] * r[b].adjoint();
                let z = &m + m.adjoint();
                // only block b is nonzero
                for (ci, c) in system.constraints.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for t in c.terms.iter().filter(|t| t.block == b) {
                        acc += t.coeff * z[(t.row, t.col)];
                    }
                    jac[(2 * ci, col)] = acc.re;
                    jac[(2 * ci + 1, col)] = acc.im;
                }
                col += 1;
            }
            unit[b][e] = C64::new(0.0, 0.0);
        }
    }
    let rhs = nalgebra::DVector::from_fn(rows, |i, _| {
        if i % 2 == 0 {
            rhs[i / 2].re
        } else {
            rhs[i / 2].im
        }
    });
    let svd = jac.svd(true, true);
    let smax = svd.singular_values.max();
    let sol = svd.solve(&rhs, 1e-12 * smax).ok()?;
    let mut out = Vec::with_capacity(r.len());
    let mut col = 0;
    for f in r {
        let mut d = DMatrix::zeros(f.nrows(), f.ncols());
        for e in 0..f.len() {
            d[e] = C64::new(sol[col], sol[col + 1]);
            col += 2;
        }
        out.push(d);
    }
    Some(out)
}

/// Minimal-norm least squares for the real-linear `J D = A(D R^* + R D^*) = rhs`.
/// The adjoint is `J^T y = (Y + Y^*) R` with `Y = A^*(y)`.
fn cgls_real(
    system: &AffineConstraintSystem,
    r: &[DMatrix<C64>],
    rhs: &[C64],
) -> Vec<DMatrix<C64>> {
    let forward = |d: &[DMatrix<C64>]| -> Vec<C64> {
        let z: Vec<DMatrix<C64>> = d
            .iter()
            .zip(r)
            .map(|(d, f)| {
                let m = d * f.adjoint();
                &m + m.adjoint()
            })
            .collect();
        system.apply(&z)
    };
    let adjoint = |y: &[C64]| -> Vec<DMatrix<C64>> {
        let mut big = system.zero_blocks();
        system.add_adjoint(y, 1.0, &mut big);
        big.iter()
            .zip(r)
            .map(|(g, f)| (g + g.adjoint()) * f)
            .collect()
    };
    let norm2 = |m: &[DMatrix<C64>]| m.iter().map(|b| b.norm_squared()).sum::<f64>();
    let rhs_norm = libm::sqrt(rhs.iter().map(|c| c.norm_sqr()).sum::<f64>());
    let mut sol: Vec<DMatrix<C64>> = r.iter().map(|f| DMatrix::zeros(f.nrows(), f.ncols())).collect();
    if rhs_norm == 0.0 {
        return sol;
    }
    let mut res = rhs.to_vec();
    let mut s = adjoint(&res);
    let mut p = s.clone();
    let mut gamma = norm2(&s);
    let gamma0 = gamma;
    let dim: usize = r.iter().map(|f| f.len()).sum();
    for _ in 0..(2 * dim).clamp(50, 1500) {
        if gamma <= 1e-30 * gamma0 {
            break;
        }
        let q = forward(&p);
        let qn = q.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if qn == 0.0 {
            break;
        }
        let alpha = gamma / qn;
        for (xb, pb) in sol.iter_mut().zip(&p) {
            *xb += pb * C64::new(alpha, 0.0);
        }
        for (rc, qc) in res.iter_mut().zip(&q) {
            *rc -= qc * alpha;
        }
        s = adjoint(&res);
        let gnew = norm2(&s);
        let beta = gnew / gamma;
        gamma = gnew;
        for (pb, sb) in p.iter_mut().zip(&s) {
            *pb = sb + &*pb * C64::new(beta, 0.0);
        }
    }
    sol
}

/// Minimal-norm least squares for `A(V S V^*) = rhs` over `S`, by CGLS.
fn cgls(
    system: &AffineConstraintSystem,
    faces: &[(DMatrix<C64>, DMatrix<C64>)],
    rhs: &[C64],
    lift: &dyn Fn(&[DMatrix<C64>]) -> Vec<DMatrix<C64>>,
) -> Vec<DMatrix<C64>> {
    let adjoint = |y: &[C64]| -> Vec<DMatrix<C64>> {
        let mut big = system.zero_blocks();
        system.add_adjoint(y, 1.0, &mut big);
        big.iter()
            .zip(faces)
            .map(|(g, (v, _))| v.adjoint() * g * v)
            .collect()
    };
    let norm2 = |m: &[DMatrix<C64>]| m.iter().map(|b| b.norm_squared()).sum::<f64>();
    let rhs_norm = libm::sqrt(rhs.iter().map(|c| c.norm_sqr()).sum::<f64>());
    let mut sol: Vec<DMatrix<C64>> = faces
        .iter()
        .map(|(v, _)| DMatrix::zeros(v.ncols(), v.ncols()))
        .collect();
    if rhs_norm == 0.0 {
        return sol;
    }
    let mut r = rhs.to_vec();
    let mut s = adjoint(&r);
    let mut p = s.clone();
    let mut gamma = norm2(&s);
    let dim: usize = faces.iter().map(|(v, _)| v.ncols() * v.ncols()).sum();
    let gamma0 = gamma;
    for _ in 0..(2 * dim).clamp(50, 2000) {
        if gamma <= 1e-32 * gamma0 {
            break;
        }
        let q = system.apply(&lift(&p));
        let qn = q.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if qn == 0.0 {
            break;
        }
        let alpha = gamma / qn;
        for (xb, pb) in sol.iter_mut().zip(&p) {
            *xb += pb * C64::new(alpha, 0.0);
        }
        for (rc, qc) in r.iter_mut().zip(&q) {
            *rc -= qc * alpha;
        }
        s = adjoint(&r);
        let gnew = norm2(&s);
        let beta = gnew / gamma;
        gamma = gnew;
        for (pb, sb) in p.iter_mut().zip(&s) {
            *pb = sb + &*pb * C64::new(beta, 0.0);
        }
        let rn = libm::sqrt(r.iter().map(|c| c.norm_sqr()).sum::<f64>());
        if rn <= 1e-15 * rhs_norm.max(1.0) {
            break;
        }
    }
    sol
}

//! The unitary-valued rational matrix `V` built from `a`, `b`, `E`.
//!
//! ```text
//! V = 1/a [ m b~    E~^t                                 ]
//!         [ E       (E E~^t - a (m a~ + b) I) / (a + m b~) ]
//! ```
//!
//! with `m = z1^r z2^s`, `a~, b~` reflected at `(n, m)` and `E~` at
//! `(n + r, m + s)`. On the torus `V` is unitary, `V [a; 0] = [m b~; E]`,
//! and every `[0; v]` with `v` orthogonal to `E` is an eigenvector.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::poly::{stability_check, AnalyticPoly, VectorPoly};

/// `numerator / denominator` entrywise, `(N + 1) x (N + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrixFn {
    pub numerator: Vec<Vec<AnalyticPoly>>,
    pub denominator: AnalyticPoly,
}

impl RationalMatrixFn {
    pub fn size(&self) -> usize {
        self.numerator.len()
    }

    pub fn eval(&self, z: &[C64]) -> DMatrix<C64> {
        let d = self.denominator.eval(z);
        let k = self.size();
        DMatrix::from_fn(k, k, |i, j| self.numerator[i][j].eval(z) / d)
    }

    /// `max |V V^* - I|` over the `grid x grid` torus sample.
    pub fn unitarity_defect(&self, grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let k = self.size();
        crate::poly::for_each_torus_point(2, grid, |theta| {
            let z = [C64::from_polar(1.0, theta[0]), C64::from_polar(1.0, theta[1])];
            let v = self.eval(&z);
            let g = &v * v.adjoint() - DMatrix::<C64>::identity(k, k);
            worst = worst.max(crate::psd::max_abs(&g));
        });
        worst
    }
}

fn monomial(r: i32, s: i32) -> AnalyticPoly {
    let d = MultiIndex::new(&[r, s]);
    AnalyticPoly::monomial(d, d, C64::new(1.0, 0.0))
}

/// Builds `V` for `a`, `b` of degree `(n, m)` and `E` with `|E|^2 = |a|^2 - |b|^2`.
///
/// Requires `E` to have at least one entry. Fails with `DenominatorZero`
/// unless both `a` and `a + z1^r z2^s b~` are certified zero-free on the
/// closed bidisk.
pub fn build_v(
    a: &AnalyticPoly,
    b: &AnalyticPoly,
    e: &VectorPoly,
    r: i32,
    s: i32,
    stability_grid: usize,
) -> Result<RationalMatrixFn> {
    let deg = a.degree();
    if a.nvars() != 2 || b.degree() != deg || e.nvars() != 2 {
        return Err(Error::Invalid("build_v expects a, b of one degree box in two variables".into()));
    }
    if e.dim() == 0 {
        return Err(Error::Invalid("build_v needs E with at least one entry".into()));
    }
    let big = MultiIndex::new(&[deg.get(0) + r, deg.get(1) + s]);
    let e = e.with_degree(big)?;
    let mono = monomial(r, s);
    let at = a.reflect(&deg)?;
    let bt = b.reflect(&deg)?;
    let et = e.reflect(&big)?;
    let mbt = mono.mul(&bt);
    let d = a.add(&mbt);
    for q in [a, &d] {
        if !stability_check(q, stability_grid.max(8), 1e-12).is_stable() {
            return Err(Error::DenominatorZero);
        }
    }
    let diag = a.mul(&mono.mul(&at).add(b));
    let size = e.dim() + 1;
    let mut numerator = Vec::with_capacity(size);
    let mut top = Vec::with_capacity(size);
    top.push(mbt.mul(&d));
    for ej in et.entries() {
        top.push(ej.mul(&d));
    }
    numerator.push(top);
    for (i, ei) in e.entries().iter().enumerate() {
        let mut row = Vec::with_capacity(size);
        row.push(ei.mul(&d));
        for (j, ej) in et.entries().iter().enumerate() {
            let mut x = ei.mul(ej);
            if i == j {
                x = x.sub(&diag);
            }
            row.push(x);
        }
        numerator.push(row);
    }
    Ok(RationalMatrixFn {
        numerator,
        denominator: a.mul(&d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::testing::{rand_poly, rng, torus_point};
    use crate::poly::TrigPoly;
    use crate::psd::SolverOptions;
    use crate::sos::multiplier_search;
    use alloc::vec;
    use nalgebra::DVector;

    fn idx(e: &[i32]) -> MultiIndex {
        MultiIndex::new(e)
    }

    /// `a` dominated by a constant, `b` small: `|b| < |a|` on the closed bidisk.
    fn stable_pair(seed: u64, d: MultiIndex) -> (AnalyticPoly, AnalyticPoly) {
        let mut r = rng(seed);
        let a = rand_poly(&mut r, d)
            .scale(C64::new(0.3, 0.0))
            .add(&AnalyticPoly::constant(d, C64::new(3.0, 0.0)));
        let b = rand_poly(&mut r, d).scale(C64::new(0.2, 0.0));
        (a, b)
    }

    fn check_relations(a: &AnalyticPoly, b: &AnalyticPoly, e: &VectorPoly, r: i32, s: i32) {
        let v = build_v(a, b, e, r, s, 16).unwrap();
        let deg = a.degree();
        let (at, bt) = (a.reflect(&deg).unwrap(), b.reflect(&deg).unwrap());
        let mut rg = rng(7);
        let k = v.size();
        for _ in 0..32 {
            let z = torus_point(&mut rg, 2);
            let vz = v.eval(&z);
            let unit = &vz * vz.adjoint() - DMatrix::<C64>::identity(k, k);
            assert!(crate::psd::max_abs(&unit) < 1e-9);

            let mono = z[0].powi(r) * z[1].powi(s);
            let ez = e.eval(&z);
            let mut x = DVector::zeros(k);
            x[0] = a.eval(&z);
            let y = &vz * &x;
            assert!((y[0] - mono * bt.eval(&z)).norm() < 1e-9);
            for i in 0..k - 1 {
                assert!((y[i + 1] - ez[i]).norm() < 1e-9);
            }

            let mut x = DVector::zeros(k);
            x[0] = b.eval(&z);
            for i in 0..k - 1 {
                x[i + 1] = ez[i];
            }
            let y = &vz * &x;
            assert!((y[0] - mono * at.eval(&z)).norm() < 1e-9);
            for i in 1..k {
                assert!(y[i].norm() < 1e-9);
            }

            if k > 2 {
                // v orthogonal to E(z)
                let ev = DVector::from_vec(ez.clone());
                let mut w = DVector::from_fn(k - 1, |i, _| C64::new(1.0 + i as f64, 0.5));
                let proj = ev.dotc(&w) / ev.dotc(&ev);
                w -= &ev * proj;
                let mut x = DVector::zeros(k);
                for i in 0..k - 1 {
                    x[i + 1] = w[i];
                }
                let lambda = -(mono * at.eval(&z) + b.eval(&z)) / (a.eval(&z) + mono * bt.eval(&z));
                let y = &vz * &x;
                assert!((y - x * lambda).iter().all(|c| c.norm() < 1e-9));
            }
        }
    }

    #[test]
    fn constant_example_is_unitary() {
        let d = idx(&[1, 1]);
        let a = AnalyticPoly::constant(d, C64::new(2.0, 0.0));
        let b = AnalyticPoly::monomial(d, d, C64::new(1.0, 0.0));
        let t = TrigPoly::mod_squared_diff(&a, &b);
        let out = multiplier_search(&t, 1, 1, 0, &SolverOptions::default()).unwrap();
        let v = build_v(&a, &b, &out.sos.e, 0, 0, 16).unwrap();
        assert_eq!(v.size(), 3);
        check_relations(&a, &b, &out.sos.e, 0, 0);
    }

    #[test]
    fn lemma_and_gram_routes() {
        for (seed, d) in [(1, idx(&[2, 1])), (2, idx(&[3, 1])), (3, idx(&[1, 2]))] {
            let (a, b) = stable_pair(seed, d);
            let t = TrigPoly::mod_squared_diff(&a, &b);
            let out =
                multiplier_search(&t, d.get(0), d.get(1), 4, &SolverOptions::default()).unwrap();
            check_relations(&a, &b, &out.sos.e, out.r, out.s);
        }
    }

    #[test]
    fn padded_multiplier() {
        // an E of larger degree is still valid at (r, s) = (1, 0)
        let d = idx(&[1, 1]);
        let (a, b) = stable_pair(4, d);
        let t = TrigPoly::mod_squared_diff(&a, &b);
        let out = crate::sos::trig_sos(&t, idx(&[2, 1]), &SolverOptions::default()).unwrap();
        check_relations(&a, &b, &out.e, 1, 0);
    }

    #[test]
    fn unstable_denominator_rejected() {
        let d = idx(&[1, 0]);
        let a = AnalyticPoly::from_terms(
            d,
            [
                (idx(&[0, 0]), C64::new(1.0, 0.0)),
                (idx(&[1, 0]), C64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let b = AnalyticPoly::zero(d);
        let e = VectorPoly::new(d, vec![a.clone()]).unwrap();
        assert!(matches!(build_v(&a, &b, &e, 0, 0, 16), Err(Error::DenominatorZero)));
    }
}

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::factor::{matrix_fejer_riesz, MatrixTrigPoly};
use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, TrigPoly, VectorPoly};

/// Two squares for a nonnegative trig polynomial of degree `(n, 1)`.
#[derive(Clone, Debug)]
pub struct TwoSquares {
    /// Exactly two entries, degree box `(n, 1)`.
    pub e: VectorPoly,
    /// Diagonal shift used by the matrix factorization (0 if none).
    pub shift: f64,
    /// Coefficient sup of `A^* A - T`.
    pub factor_residual: f64,
}

/// Writes `t = t0(z1) + z2 t1(z1) + conj(z2 t1(z1))` as `|E1|^2 + |E2|^2`.
///
/// `T(z1) = [[t0/2, t1], [conj(t1), t0/2]]` is PSD on the circle because
/// `t0 >= 2|t1|`; factoring `T = A^* A` gives `E = A(z1) [1; z2]`.
pub fn lemma_two_squares(t: &TrigPoly, n: i32) -> Result<TwoSquares> {
    assert_eq!(t.nvars(), 2, "two-variable input expected");
    let deg = t.degree();
    if deg.get(1) > 1 {
        return Err(Error::DegreeTooHigh {
            var: 2,
            found: deg.get(1),
            allowed: 1,
        });
    }
    if deg.get(0) > n {
        return Err(Error::DegreeTooHigh {
            var: 1,
            found: deg.get(0),
            allowed: n,
        });
    }
    let t0 = t.z2_slice(0);
    let t1 = t.z2_slice(1);
    let half = C64::new(0.5, 0.0);
    let mut coeffs = BTreeMap::new();
    for j in -n..=n {
        let k = MultiIndex::new(&[j]);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = t0.coeff(&k) * half;
        m[(1, 1)] = t0.coeff(&k) * half;
        m[(0, 1)] = t1.coeff(&k);
        m[(1, 0)] = t1.coeff(&MultiIndex::new(&[-j])).conj();
        coeffs.insert(j, m);
    }
    let big_t = MatrixTrigPoly::new(2, coeffs);
    let f = matrix_fejer_riesz(&big_t)?;

    let degree = MultiIndex::new(&[n, 1]);
    let entries = (0..2)
        .map(|row| {
            let terms: Vec<(MultiIndex, C64)> = f
                .factor
                .coeffs()
                .iter()
                .enumerate()
                .flat_map(|(k, a)| {
                    let k = k as i32;
                    [
                        (MultiIndex::new(&[k, 0]), a[(row, 0)]),
                        (MultiIndex::new(&[k, 1]), a[(row, 1)]),
                    ]
                })
                .collect();
            AnalyticPoly::from_terms(degree, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoSquares {
        e: VectorPoly::new(degree, entries)?,
        shift: f.shift,
        factor_residual: f.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::testing::{rand_poly, rng};
    use alloc::vec;

    #[test]
    fn constant_three() {
        let t = TrigPoly::constant(2, 3.0);
        let out = lemma_two_squares(&t, 1).unwrap();
        assert_eq!(out.e.dim(), 2);
        assert_eq!(out.e.degree(), MultiIndex::new(&[1, 1]));
        assert!(out.e.norm_sq_trig().distance(&t) < 1e-12);
        // E = sqrt(3/2) [1; z2]
        let s = libm::sqrt(1.5);
        let e = &out.e.entries();
        assert!((e[0].coeff(&MultiIndex::new(&[0, 0])).re - s).abs() < 1e-12);
        assert!((e[1].coeff(&MultiIndex::new(&[0, 1])).re - s).abs() < 1e-12);
    }

    #[test]
    fn rank_one_boundary_case() {
        // 2 + z1 z2 + conj(z1 z2) = |1 + z1 z2|^2
        let t = TrigPoly::from_terms(
            2,
            [
                (MultiIndex::new(&[0, 0]), C64::new(2.0, 0.0)),
                (MultiIndex::new(&[1, 1]), C64::new(1.0, 0.0)),
                (MultiIndex::new(&[-1, -1]), C64::new(1.0, 0.0)),
            ],
        );
        let out = lemma_two_squares(&t, 1).unwrap();
        let want = TrigPoly::mod_squared(
            &AnalyticPoly::from_terms(
                MultiIndex::new(&[1, 1]),
                [
                    (MultiIndex::new(&[0, 0]), C64::new(1.0, 0.0)),
                    (MultiIndex::new(&[1, 1]), C64::new(1.0, 0.0)),
                ],
            )
            .unwrap(),
        );
        assert!(out.e.norm_sq_trig().distance(&want) < 1e-8);
    }

    #[test]
    fn rejects_high_z2_degree() {
        let t = TrigPoly::from_terms(2, [(MultiIndex::new(&[0, 2]), C64::new(0.1, 0.0))])
            .add(&TrigPoly::constant(2, 1.0));
        assert!(matches!(
            lemma_two_squares(&t, 0),
            Err(Error::DegreeTooHigh { var: 2, .. })
        ));
    }

    #[test]
    fn construct_and_recover() {
        let mut r = rng(41);
        for n in 0..4 {
            let d = MultiIndex::new(&[n, 1]);
            let e0 = VectorPoly::new(d, vec![rand_poly(&mut r, d), rand_poly(&mut r, d)]).unwrap();
            let t = e0.norm_sq_trig();
            let out = lemma_two_squares(&t, n).unwrap();
            assert!(out.e.norm_sq_trig().distance(&t) <= 1e-8);
        }
    }
}

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, SesquiPoly, TrigPoly};

/// Column vector of polynomials sharing a variable count and degree box.
///
/// A sum of squares `sum |E_j|^2` is stored as the vector `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPoly {
    degree: MultiIndex,
    entries: Vec<AnalyticPoly>,
}

impl VectorPoly {
    /// Collects entries and re-declares each at the common `degree`.
    pub fn new(degree: MultiIndex, entries: Vec<AnalyticPoly>) -> Result<Self> {
        let entries = entries
            .into_iter()
            .map(|e| {
                if e.nvars() != degree.len() {
                    return Err(Error::VariableCount {
                        expected: degree.len(),
                        found: e.nvars(),
                    });
                }
                e.with_degree(degree)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { degree, entries })
    }

    pub fn empty(degree: MultiIndex) -> Self {
        Self {
            degree,
            entries: Vec::new(),
        }
    }

    pub fn degree(&self) -> MultiIndex {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.degree.len()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AnalyticPoly] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [AnalyticPoly] {
        &mut self.entries
    }

    /// `||E||^2` as a Laurent polynomial on the torus.
    pub fn norm_sq_trig(&self) -> TrigPoly {
        self.entries
            .iter()
            .fold(TrigPoly::zero(self.nvars()), |acc, e| {
                acc.add(&TrigPoly::mod_squared(e))
            })
    }

    /// `||E||^2` as a polynomial in `z` and `conj(z)`.
    pub fn norm_sq_sesqui(&self) -> SesquiPoly {
        let mut s = SesquiPoly::zero(self.nvars());
        for e in &self.entries {
            s.add_outer(e, e, 1.0);
        }
        s
    }

    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        self.entries.iter().map(|e| e.eval(z)).collect()
    }

    pub fn norm_sq_at(&self, z: &[C64]) -> f64 {
        self.entries.iter().map(|e| e.eval(z).norm_sqr()).sum()
    }

    /// Entrywise reflection at a common box.
    pub fn reflect(&self, d: &MultiIndex) -> Result<Self> {
        Ok(Self {
            degree: *d,
            entries: self
                .entries
                .iter()
                .map(|e| e.reflect(d))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Views every entry in `nvars` variables.
    pub fn embed(&self, nvars: usize) -> Result<Self> {
        Ok(Self {
            degree: self.degree.resize(nvars),
            entries: self
                .entries
                .iter()
                .map(|e| e.embed(nvars))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Re-declares the common degree box.
    pub fn with_degree(&self, degree: MultiIndex) -> Result<Self> {
        Self::new(degree, self.entries.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::testing::{rand_poly, rng, torus_point};
    use alloc::vec;

    #[test]
    fn norm_matches_pointwise() {
        let mut r = rng(5);
        let d = MultiIndex::new(&[2, 1]);
        let e = VectorPoly::new(d, vec![rand_poly(&mut r, d), rand_poly(&mut r, d)]).unwrap();
        let t = e.norm_sq_trig();
        let s = e.norm_sq_sesqui();
        for _ in 0..32 {
            let z = torus_point(&mut r, 2);
            assert!((t.eval_complex(&z).re - e.norm_sq_at(&z)).abs() < 1e-12);
            let w = [z[0] * 0.7, z[1] * 0.2];
            assert!((s.eval(&w) - e.norm_sq_at(&w)).abs() < 1e-12);
        }
    }

    #[test]
    fn reflect_unit_vector() {
        let d = MultiIndex::new(&[0, 1]);
        let one = C64::new(1.0, 0.0);
        let e = VectorPoly::new(
            d,
            vec![
                AnalyticPoly::constant(d, one),
                AnalyticPoly::monomial(d, d, one),
            ],
        )
        .unwrap();
        let r = e.reflect(&d).unwrap();
        assert_eq!(r.entries()[0], AnalyticPoly::monomial(d, d, one));
        assert_eq!(r.entries()[1], AnalyticPoly::constant(d, one));
        assert_eq!(r.reflect(&d).unwrap(), e);
    }
}

use alloc::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::index::MultiIndex;
use crate::poly::analytic::PowerTable;
use crate::poly::{AnalyticPoly, DROP_TOL};

/// Polynomial in `z` and `conj(z)`: `sum c[a, b] z^a conj(z)^b`.
///
/// Two sides of an Agler identity agree on the whole polydisk exactly when
/// their expansions here agree coefficient by coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct SesquiPoly {
    nvars: usize,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl SesquiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `s * f conj(g)`.
    pub fn add_outer(&mut self, f: &AnalyticPoly, g: &AnalyticPoly, s: f64) {
        assert!(f.nvars() == self.nvars && g.nvars() == self.nvars);
        for (i, a) in f.terms() {
            for (j, b) in g.terms() {
                self.add_term(*i, *j, a * b.conj() * s);
            }
        }
    }

    /// `|f|^2`.
    pub fn mod_squared(f: &AnalyticPoly) -> Self {
        let mut s = Self::zero(f.nvars());
        s.add_outer(f, f, 1.0);
        s
    }

    pub fn add_term(&mut self, a: MultiIndex, b: MultiIndex, c: C64) {
        *self.coeffs.entry((a, b)).or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn coeff(&self, a: &MultiIndex, b: &MultiIndex) -> C64 {
        self.coeffs.get(&(*a, *b)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &C64)> {
        self.coeffs.iter()
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.nvars, other.nvars);
        for ((a, b), c) in &other.coeffs {
            self.add_term(*a, *b, c * s);
        }
    }

    /// Multiplies by `1 - |z_var|^2`.
    pub fn times_defect(&self, var: usize) -> Self {
        let e = MultiIndex::unit(self.nvars, var);
        let mut out = self.clone();
        for ((a, b), c) in &self.coeffs {
            out.add_term(*a + e, *b + e, -c);
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn drop_noise(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= DROP_TOL);
    }

    /// Polarized evaluation `sum c[a, b] z^a conj(w)^b`.
    pub fn eval_polarized(&self, z: &[C64], w: &[C64]) -> C64 {
        let bound = self.coeffs.keys().fold(MultiIndex::zero(self.nvars), |acc, (a, b)| {
            acc.sup(a).sup(b)
        });
        let wc: alloc::vec::Vec<C64> = w.iter().map(|x| x.conj()).collect();
        let pz = PowerTable::new(z, &bound);
        let pw = PowerTable::new(&wc, &bound);
        self.coeffs
            .iter()
            .map(|((a, b), c)| c * pz.monomial(a) * pw.monomial(b))
            .sum()
    }

    /// Value on the diagonal `w = z` (real for Hermitian coefficients).
    pub fn eval(&self, z: &[C64]) -> f64 {
        self.eval_polarized(z, z).re
    }
}

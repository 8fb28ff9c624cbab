use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::{MultiIndex, MAX_VARS};
use crate::poly::DROP_TOL;

/// Complex polynomial in 1..=3 variables with a declared degree box.
///
/// The degree box matters: reflection is taken with respect to it, so the
/// constant `1` viewed at degree `(1,1,1)` reflects to `z1 z2 z3`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticPoly {
    degree: MultiIndex,
    coeffs: BTreeMap<MultiIndex, C64>,
}

impl AnalyticPoly {
    pub fn zero(degree: MultiIndex) -> Self {
        assert!(degree.is_nonnegative(), "degree box must be nonnegative");
        Self {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(degree: MultiIndex, c: C64) -> Self {
        Self::monomial(degree, MultiIndex::zero(degree.len()), c)
    }

    pub fn monomial(degree: MultiIndex, index: MultiIndex, c: C64) -> Self {
        let mut p = Self::zero(degree);
        assert!(index.in_box(&degree), "monomial outside degree box");
        p.add_term(index, c);
        p.canonicalize();
        p
    }

    pub fn from_terms<I>(degree: MultiIndex, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut p = Self::zero(degree);
        for (index, c) in terms {
            if index.len() != degree.len() {
                return Err(Error::VariableCount {
                    expected: degree.len(),
                    found: index.len(),
                });
            }
            if !index.in_box(&degree) {
                return Err(Error::OutsideDegreeBox { index, degree });
            }
            p.add_term(index, c);
        }
        p.canonicalize();
        Ok(p)
    }

    /// Builds from a dense coefficient list in `degree.box_iter()` order.
    pub fn from_dense(degree: MultiIndex, dense: &[C64]) -> Self {
        assert_eq!(dense.len(), degree.box_size());
        let mut p = Self::zero(degree);
        for (index, &c) in degree.box_iter().zip(dense) {
            p.add_term(index, c);
        }
        p.canonicalize();
        p
    }

    fn add_term(&mut self, index: MultiIndex, c: C64) {
        *self.coeffs.entry(index).or_insert(C64::new(0.0, 0.0)) += c;
    }

    fn canonicalize(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= DROP_TOL);
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.degree.len()
    }

    #[inline]
    pub fn degree(&self) -> MultiIndex {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, index: &MultiIndex) -> C64 {
        self.coeffs.get(index).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Dense coefficients in `degree().box_iter()` order.
    pub fn to_dense(&self) -> Vec<C64> {
        self.degree.box_iter().map(|i| self.coeff(&i)).collect()
    }

    /// Componentwise maximum of the occupied exponents.
    pub fn occupied_degree(&self) -> MultiIndex {
        self.coeffs
            .keys()
            .fold(MultiIndex::zero(self.nvars()), |acc, i| acc.sup(i))
    }

    pub fn one_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Re-declares the degree box; fails if an occupied index falls outside.
    pub fn with_degree(&self, degree: MultiIndex) -> Result<Self> {
        Self::from_terms(degree, self.coeffs.iter().map(|(i, c)| (*i, *c)))
    }

    /// Views the polynomial in `nvars` variables; new variables get degree 0.
    pub fn embed(&self, nvars: usize) -> Result<Self> {
        assert!(nvars <= MAX_VARS && nvars >= 1);
        let degree = self.degree.resize(nvars);
        let mut p = Self::zero(degree);
        for (i, c) in &self.coeffs {
            let j = i.resize(nvars);
            if j.resize(self.nvars()) != *i {
                return Err(Error::OutsideDegreeBox { index: *i, degree });
            }
            p.add_term(j, *c);
        }
        Ok(p)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero(self.degree);
        for (i, c) in &self.coeffs {
            p.add_term(*i, c * s);
        }
        p.canonicalize();
        p
    }

    pub fn conj_coeffs(&self) -> Self {
        let mut p = self.clone();
        for c in p.coeffs.values_mut() {
            *c = c.conj();
        }
        p
    }

    /// Sum; the degree box is the componentwise maximum.
    pub fn add(&self, other: &Self) -> Self {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
        let mut p = self.clone();
        p.degree = self.degree.sup(&other.degree);
        for (i, c) in &other.coeffs {
            p.add_term(*i, c * s);
        }
        p.canonicalize();
        p
    }

    /// Product; the degree box is the sum of the boxes.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
        let mut p = Self::zero(self.degree + other.degree);
        for (i, c) in &self.coeffs {
            for (j, d) in &other.coeffs {
                p.add_term(*i + *j, c * d);
            }
        }
        p.canonicalize();
        p
    }

    /// Multiplies by the monomial `z^shift`, growing the box by `shift`.
    pub fn shift(&self, shift: &MultiIndex) -> Self {
        assert!(shift.is_nonnegative());
        Self {
            degree: self.degree + *shift,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i + *shift, *c)).collect(),
        }
    }

    /// `z^d * conj(p(1/conj(z)))`: coefficient at `b` is `conj(p[d - b])`.
    pub fn reflect(&self, d: &MultiIndex) -> Result<Self> {
        if d.len() != self.nvars() {
            return Err(Error::VariableCount {
                expected: self.nvars(),
                found: d.len(),
            });
        }
        let mut p = Self::zero(*d);
        for (i, c) in &self.coeffs {
            if !i.le_box(d) {
                return Err(Error::OutsideDegreeBox {
                    index: *i,
                    degree: *d,
                });
            }
            p.add_term(*d - *i, c.conj());
        }
        Ok(p)
    }

    /// Reflection at the declared degree box.
    pub fn reflect_declared(&self) -> Self {
        self.reflect(&self.degree).expect("declared box contains all indices")
    }

    /// Writes `p = a + b z3` with `a, b` in two variables of box `(n, m)`.
    pub fn split_z3(&self) -> Result<(Self, Self)> {
        if self.nvars() != 3 {
            return Err(Error::VariableCount {
                expected: 3,
                found: self.nvars(),
            });
        }
        let occupied = self.occupied_degree().get(2);
        if occupied > 1 {
            return Err(Error::DegreeTooHigh {
                var: 3,
                found: occupied,
                allowed: 1,
            });
        }
        let box2 = self.degree.resize(2);
        let mut a = Self::zero(box2);
        let mut b = Self::zero(box2);
        for (i, c) in &self.coeffs {
            let j = i.resize(2);
            if i.get(2) == 0 {
                a.add_term(j, *c);
            } else {
                b.add_term(j, *c);
            }
        }
        Ok((a, b))
    }

    /// Inverse of [`split_z3`](Self::split_z3): `a + b z3` in three variables.
    pub fn join_z3(a: &Self, b: &Self) -> Self {
        assert!(a.nvars() == 2 && b.nvars() == 2);
        let box2 = a.degree.sup(&b.degree);
        let degree = MultiIndex::new(&[box2.get(0), box2.get(1), 1]);
        let mut p = Self::zero(degree);
        for (i, c) in &a.coeffs {
            p.add_term(i.resize(3), *c);
        }
        for (i, c) in &b.coeffs {
            p.add_term(i.resize(3).with(2, 1), *c);
        }
        p.canonicalize();
        p
    }

    /// Substitutes `z_var = value`; the variable stays with degree 0.
    pub fn fix_var(&self, var: usize, value: C64) -> Self {
        let degree = self.degree.with(var, 0);
        let mut p = Self::zero(degree);
        for (i, c) in &self.coeffs {
            p.add_term(i.with(var, 0), c * value.powi(i.get(var)));
        }
        p.canonicalize();
        p
    }

    /// Coefficients of the univariate polynomial in `var` (other variables must be absent).
    pub fn univariate_coeffs(&self, var: usize) -> Vec<C64> {
        let n = self.degree.get(var) as usize;
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for (i, c) in &self.coeffs {
            debug_assert!((0..self.nvars()).all(|v| v == var || i.get(v) == 0));
            out[i.get(var) as usize] += c;
        }
        out
    }

    /// Evaluates at a point using per-variable power tables.
    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.nvars(), "point dimension mismatch");
        let powers = PowerTable::new(z, &self.degree);
        self.coeffs
            .iter()
            .map(|(i, c)| c * powers.monomial(i))
            .sum()
    }

    /// Sum over `|alpha_var| |c_alpha|`, a bound for `|d p / d z_var|` on the closed polydisk.
    pub fn derivative_bound(&self, var: usize) -> f64 {
        self.coeffs
            .iter()
            .map(|(i, c)| i.get(var) as f64 * c.norm())
            .sum()
    }
}

/// Powers `z_j^k` for `0 <= k <= degree_j`.
pub(crate) struct PowerTable {
    table: [Vec<C64>; MAX_VARS],
}

impl PowerTable {
    pub(crate) fn new(z: &[C64], degree: &MultiIndex) -> Self {
        let mut table: [Vec<C64>; MAX_VARS] = Default::default();
        for (v, zv) in z.iter().enumerate() {
            let d = degree.get(v).max(0) as usize;
            let mut row = Vec::with_capacity(d + 1);
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=d {
                row.push(acc);
                acc *= zv;
            }
            table[v] = row;
        }
        Self { table }
    }

    #[inline]
    pub(crate) fn monomial(&self, index: &MultiIndex) -> C64 {
        let mut m = C64::new(1.0, 0.0);
        for (v, &k) in index.as_slice().iter().enumerate() {
            m *= self.table[v][k as usize];
        }
        m
    }
}

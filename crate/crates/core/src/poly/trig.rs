use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, DROP_TOL};

/// Hermitian Laurent polynomial on the torus: `t[-k] = conj(t[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    nvars: usize,
    coeffs: BTreeMap<MultiIndex, C64>,
}

/// Value of a trigonometric polynomial at a torus point. The imaginary part
/// is rounding residue and is kept only as a diagnostic.
#[derive(Clone, Copy, Debug)]
pub struct TorusValue {
    pub value: f64,
    pub discarded_imag: f64,
}

impl TrigPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut t = Self::zero(nvars);
        t.add_term(MultiIndex::zero(nvars), C64::new(c, 0.0));
        t.finish()
    }

    /// Builds from raw coefficients and symmetrizes.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut t = Self::zero(nvars);
        for (k, c) in terms {
            assert_eq!(k.len(), nvars);
            t.add_term(k, c);
        }
        t.finish()
    }

    /// Laurent expansion of `f conj(g)` restricted to the torus.
    pub fn cross(f: &AnalyticPoly, g: &AnalyticPoly) -> Self {
        assert_eq!(f.nvars(), g.nvars());
        let mut t = Self::zero(f.nvars());
        for (i, a) in f.terms() {
            for (j, b) in g.terms() {
                t.add_term(*i - *j, a * b.conj());
            }
        }
        t
    }

    /// `|f|^2` on the torus.
    pub fn mod_squared(f: &AnalyticPoly) -> Self {
        Self::cross(f, f).finish()
    }

    /// Laurent expansion of `|a|^2 - |b|^2` on the torus.
    pub fn mod_squared_diff(a: &AnalyticPoly, b: &AnalyticPoly) -> Self {
        let mut t = Self::cross(a, a);
        for (k, c) in Self::cross(b, b).coeffs {
            t.add_term(k, -c);
        }
        t.finish()
    }

    fn add_term(&mut self, k: MultiIndex, c: C64) {
        *self.coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
    }

    fn finish(mut self) -> Self {
        self.symmetrize();
        self
    }

    /// Enforces `t[-k] = conj(t[k])` by averaging, then drops noise.
    pub fn symmetrize(&mut self) {
        let keys: Vec<MultiIndex> = self.coeffs.keys().copied().collect();
        for k in keys {
            self.coeffs.entry(-k).or_insert(C64::new(0.0, 0.0));
        }
        let mut out = BTreeMap::new();
        for (k, c) in &self.coeffs {
            let m = self.coeffs[&-*k];
            let v = (c + m.conj()) * 0.5;
            if v.norm() >= DROP_TOL {
                out.insert(*k, v);
            }
        }
        self.coeffs = out;
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, k: &MultiIndex) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Componentwise maximum of `|k_j|` over the support.
    pub fn degree(&self) -> MultiIndex {
        self.coeffs.keys().fold(MultiIndex::zero(self.nvars), |acc, k| {
            let abs: Vec<i32> = k.as_slice().iter().map(|x| x.abs()).collect();
            acc.sup(&MultiIndex::new(&abs))
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(k, c)| (self.coeff(&-*k) - c.conj()).norm() <= tol)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut t = self.clone();
        for (k, c) in &other.coeffs {
            t.add_term(*k, c * s);
        }
        t.finish()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::zero(self.nvars).axpy(s, self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn one_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Max coefficient distance to another trig polynomial.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).max_abs_coeff()
    }

    /// Sum over `|k_var| |t_k|`, a Lipschitz bound in the angle `theta_var`.
    pub fn angle_lipschitz(&self, var: usize) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| k.get(var).abs() as f64 * c.norm())
            .sum()
    }

    /// Complex evaluation at an arbitrary nonzero point.
    pub fn eval_complex(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.nvars);
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let mut m = *c;
                for (v, &e) in k.as_slice().iter().enumerate() {
                    m *= z[v].powi(e);
                }
                m
            })
            .sum()
    }

    /// Value at the torus point with the given angles.
    pub fn eval_angles(&self, theta: &[f64]) -> TorusValue {
        let z: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let v = self.eval_complex(&z);
        TorusValue {
            value: v.re,
            discarded_imag: v.im,
        }
    }

    /// Uniform `grid^nvars` torus sample; returns (minimum, maximum).
    pub fn grid_range(&self, grid: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for_each_torus_point(self.nvars, grid, |theta| {
            let v = self.eval_angles(theta).value;
            lo = lo.min(v);
            hi = hi.max(v);
        });
        (lo, hi)
    }

    /// Certified lower bound: grid minimum minus the Lipschitz slack of the grid.
    pub fn certified_lower_bound(&self, grid: usize) -> (f64, f64) {
        let (lo, _) = self.grid_range(grid);
        let h = core::f64::consts::PI / grid as f64;
        let slack: f64 = (0..self.nvars).map(|v| self.angle_lipschitz(v) * h).sum();
        (lo, lo - slack)
    }

    /// Extracts the one-variable coefficient `t_j(z1)` multiplying `z2^j`.
    pub fn z2_slice(&self, j: i32) -> TrigPoly {
        assert_eq!(self.nvars, 2);
        let mut t = Self::zero(1);
        for (k, c) in &self.coeffs {
            if k.get(1) == j {
                t.add_term(MultiIndex::new(&[k.get(0)]), *c);
            }
        }
        // slices with j != 0 are not Hermitian on their own
        t
    }
}

/// Calls `f` on every point of the uniform `grid^nvars` angle grid.
pub fn for_each_torus_point(nvars: usize, grid: usize, mut f: impl FnMut(&[f64])) {
    let step = 2.0 * core::f64::consts::PI / grid as f64;
    let total = grid.pow(nvars as u32);
    let mut theta = [0.0; 3];
    for flat in 0..total {
        let mut r = flat;
        for v in 0..nvars {
            theta[v] = (r % grid) as f64 * step;
            r /= grid;
        }
        f(&theta[..nvars]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::testing::{rand_poly, rng, torus_point};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn constant_difference() {
        let d = MultiIndex::new(&[1, 1]);
        let a = AnalyticPoly::constant(d, c(2.0));
        let b = AnalyticPoly::monomial(d, MultiIndex::new(&[1, 0]), c(1.0));
        let t = TrigPoly::mod_squared_diff(&a, &b);
        assert_eq!(t, TrigPoly::constant(2, 3.0));
    }

    #[test]
    fn two_minus_z() {
        let d = MultiIndex::new(&[1, 1]);
        let a = AnalyticPoly::from_terms(
            d,
            [
                (MultiIndex::new(&[0, 0]), c(2.0)),
                (MultiIndex::new(&[1, 0]), c(-1.0)),
            ],
        )
        .unwrap();
        let t = TrigPoly::mod_squared_diff(&a, &AnalyticPoly::zero(d));
        assert_eq!(t.coeff(&MultiIndex::new(&[0, 0])), c(5.0));
        assert_eq!(t.coeff(&MultiIndex::new(&[1, 0])), c(-2.0));
        assert_eq!(t.coeff(&MultiIndex::new(&[-1, 0])), c(-2.0));
        assert_eq!(t.terms().count(), 3);
    }

    #[test]
    fn pointwise_matches_moduli() {
        let mut r = rng(11);
        let d = MultiIndex::new(&[3, 2]);
        for _ in 0..10 {
            let a = rand_poly(&mut r, d);
            let b = rand_poly(&mut r, d);
            let t = TrigPoly::mod_squared_diff(&a, &b);
            assert!(t.is_hermitian(0.0));
            for _ in 0..64 {
                let z = torus_point(&mut r, 2);
                let v = t.eval_complex(&z);
                let want = a.eval(&z).norm_sqr() - b.eval(&z).norm_sqr();
                assert!((v.re - want).abs() < 1e-12);
                assert!(v.im.abs() < 1e-12);
            }
        }
    }
}

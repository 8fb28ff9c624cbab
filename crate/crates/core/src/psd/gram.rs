use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, SesquiPoly, TrigPoly, VectorPoly};
use crate::psd::eigen::{hermitian_eigen, max_abs};

/// Relative eigenvalue threshold below which a direction counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Hermitian PSD matrix `G` over a monomial basis `v`; represents the
/// kernel `K(z, w) = sum G[i, j] z^{v_i} conj(w)^{v_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramCertificate {
    pub nvars: usize,
    pub basis: Vec<MultiIndex>,
    pub matrix: DMatrix<C64>,
    /// Smallest eigenvalue encountered (nonnegative means clean).
    pub psd_defect: f64,
}

impl GramCertificate {
    pub fn new(nvars: usize, basis: Vec<MultiIndex>, matrix: DMatrix<C64>) -> Self {
        assert_eq!(basis.len(), matrix.nrows());
        let psd_defect = hermitian_eigen(&matrix).0.first().copied().unwrap_or(0.0);
        Self {
            nvars,
            basis,
            matrix,
            psd_defect,
        }
    }

    /// Gram matrix of an explicit vector: `G = sum_k c_k c_k^*`.
    pub fn from_vector(f: &VectorPoly, basis: Vec<MultiIndex>) -> Self {
        let n = basis.len();
        let mut g = DMatrix::zeros(n, n);
        for e in f.entries() {
            let c: Vec<C64> = basis.iter().map(|b| e.coeff(b)).collect();
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += c[i] * c[j].conj();
                }
            }
        }
        Self::new(f.nvars(), basis, g)
    }

    /// Smallest box containing the basis.
    pub fn degree(&self) -> MultiIndex {
        self.basis
            .iter()
            .fold(MultiIndex::zero(self.nvars), |acc, b| acc.sup(b))
    }

    /// The represented kernel on the diagonal, as a polynomial in `z, conj(z)`.
    pub fn quadratic_form(&self) -> SesquiPoly {
        let mut s = SesquiPoly::zero(self.nvars);
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                s.add_term(*a, *b, self.matrix[(i, j)]);
            }
        }
        s.drop_noise();
        s
    }

    /// The represented kernel restricted to the torus.
    pub fn torus_form(&self) -> TrigPoly {
        let mut terms = Vec::new();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                terms.push((*a - *b, self.matrix[(i, j)]));
            }
        }
        TrigPoly::from_terms(self.nvars, terms)
    }
}

/// Factors a Gram certificate into polynomials: `||F||^2` equals its quadratic form.
///
/// One entry per eigenvalue above `RANK_TOL * lambda_max`; entry `k` is
/// `sqrt(lambda_k) * sum_i v_k[i] z^{basis_i}`.
pub fn psd_factor(g: &GramCertificate) -> Result<VectorPoly> {
    let degree = g.degree();
    if g.basis.is_empty() {
        return Ok(VectorPoly::empty(degree));
    }
    let (w, v) = hermitian_eigen(&g.matrix);
    let lmax = w.last().copied().unwrap_or(0.0).max(0.0);
    let lmin = w[0];
    if lmin < -RANK_TOL * lmax.max(max_abs(&g.matrix)) {
        return Err(Error::NotPsd {
            angle: f64::NAN,
            eigenvalue: lmin,
        });
    }
    let mut entries = Vec::new();
    for k in (0..w.len()).rev() {
        if w[k] <= RANK_TOL * lmax || w[k] <= 0.0 {
            break;
        }
        let s = libm::sqrt(w[k]);
        let terms = g
            .basis
            .iter()
            .enumerate()
            .map(|(i, b)| (*b, v[(i, k)] * s));
        entries.push(AnalyticPoly::from_terms(degree, terms)?);
    }
    VectorPoly::new(degree, entries)
}

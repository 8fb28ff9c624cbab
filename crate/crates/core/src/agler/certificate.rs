use alloc::string::String;
use alloc::vec::Vec;

use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, VectorPoly};
use crate::sos::Attempt;

/// Construction record. Nothing here is trusted by the verifier.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    /// Route that produced `E` ("lemma", "scalar" or "gram").
    pub e_route: String,
    /// Coefficient residual of `|E|^2 - (|a|^2 - |b|^2)` on the torus.
    pub e_residual: f64,
    /// Solver residual of the `H1, H2` Gram system.
    pub h_residual: f64,
    pub h_iterations: usize,
    /// Diagonal shifts applied by spectral factorization.
    pub eps_shifts: Vec<f64>,
    /// Number of squares in `E`, `H1`, `H2`.
    pub square_counts: [usize; 3],
    pub search_trace: Vec<Attempt>,
    pub stability: String,
    /// Largest `|V V* - I|` seen on a check grid.
    pub v_unitarity: f64,
    pub warnings: Vec<String>,
    /// Creation time; excluded from comparisons.
    pub timestamp: Option<String>,
}

/// `(r, s, E, H1, H2)` for `p`; see the module docs for the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct AglerCertificate {
    pub p: AnalyticPoly,
    pub r: i32,
    pub s: i32,
    /// Two variables, box `(n + r, m + s)`.
    pub e: VectorPoly,
    /// Three variables, box `(n + r - 1, m + s, 1)`.
    pub h1: VectorPoly,
    /// Three variables, box `(n + r, m + s - 1, 1)`.
    pub h2: VectorPoly,
    pub metadata: Metadata,
}

impl AglerCertificate {
    /// `(n + r, m + s)`.
    pub fn big_degree(&self) -> (i32, i32) {
        let d = self.p.degree();
        (d.get(0) + self.r, d.get(1) + self.s)
    }

    /// Declared boxes of `E`, `H1`, `H2`; a negative `H` side is clamped to zero
    /// (that `H` is then empty).
    pub fn boxes(&self) -> [MultiIndex; 3] {
        let (nn, mm) = self.big_degree();
        [
            MultiIndex::new(&[nn, mm]),
            MultiIndex::new(&[(nn - 1).max(0), mm, 1]),
            MultiIndex::new(&[nn, (mm - 1).max(0), 1]),
        ]
    }

    /// `(n + r, m + s, 1)`, the box `z1^r z2^s p~` is reflected at.
    pub fn reflect_box(&self) -> MultiIndex {
        let (nn, mm) = self.big_degree();
        MultiIndex::new(&[nn, mm, 1])
    }
}

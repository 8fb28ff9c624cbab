use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::psd::eigen::hermitian_eigen;

/// One term `coeff * X_block[row, col]` of a linear functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub coeff: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub target: C64,
}

/// Linear equations on a tuple of square blocks.
///
/// Systems built by this crate are Hermitian-consistent: the constraint on
/// `(i, j)` is paired with the conjugate constraint on `(j, i)`, so
/// projecting a Hermitian point yields a Hermitian point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineConstraintSystem {
    pub block_sizes: Vec<usize>,
    pub constraints: Vec<Constraint>,
}

impl AffineConstraintSystem {
    pub fn new(block_sizes: Vec<usize>) -> Self {
        Self {
            block_sizes,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, terms: Vec<Term>, target: C64) {
        for t in &terms {
            assert!(t.row < self.block_sizes[t.block] && t.col < self.block_sizes[t.block]);
        }
        self.constraints.push(Constraint { terms, target });
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn zero_blocks(&self) -> Vec<DMatrix<C64>> {
        self.block_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }

    /// `A(X)`.
    pub fn apply(&self, x: &[DMatrix<C64>]) -> Vec<C64> {
        self.constraints
            .iter()
            .map(|c| c.terms.iter().map(|t| t.coeff * x[t.block][(t.row, t.col)]).sum())
            .collect()
    }

    /// Adds `s * A^*(y)` to `x`.
    pub fn add_adjoint(&self, y: &[C64], s: f64, x: &mut [DMatrix<C64>]) {
        for (c, yc) in self.constraints.iter().zip(y) {
            for t in &c.terms {
                x[t.block][(t.row, t.col)] += t.coeff.conj() * yc * s;
            }
        }
    }

    /// `A(X) - b`.
    pub fn residual(&self, x: &[DMatrix<C64>]) -> Vec<C64> {
        self.apply(x)
            .into_iter()
            .zip(&self.constraints)
            .map(|(v, c)| v - c.target)
            .collect()
    }

    /// Largest violation, each scaled by the norm of its functional
    /// (or by 1 when the functional is empty).
    pub fn scaled_violation(&self, x: &[DMatrix<C64>]) -> f64 {
        self.residual(x)
            .iter()
            .zip(&self.constraints)
            .map(|(r, c)| {
                let norm = libm::sqrt(c.terms.iter().map(|t| t.coeff.norm_sqr()).sum::<f64>());
                r.norm() / if norm > 0.0 { norm } else { 1.0 }
            })
            .fold(0.0, |a, v| if v.is_nan() { f64::INFINITY } else { a.max(v) })
    }
}

/// Orthogonal projector onto `{X : A(X) = b}`, with `(A A^*)^+` precomputed
/// per connected component of the constraint graph.
pub struct AffineProjector<'a> {
    system: &'a AffineConstraintSystem,
    components: Vec<(Vec<usize>, DMatrix<C64>)>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl<'a> AffineProjector<'a> {
    pub fn new(system: &'a AffineConstraintSystem) -> Self {
        let m = system.len();
        let offsets: Vec<usize> = system
            .block_sizes
            .iter()
            .scan(0, |acc, n| {
                let o = *acc;
                *acc += n * n;
                Some(o)
            })
            .collect();
        let nvar = system.block_sizes.iter().map(|n| n * n).sum::<usize>();
        let var = |t: &Term| offsets[t.block] + t.row * system.block_sizes[t.block] + t.col;

        // constraints touching each variable
        let mut touching: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nvar];
        for (ci, c) in system.constraints.iter().enumerate() {
            for t in &c.terms {
                touching[var(t)].push((ci, t.coeff));
            }
        }
        let mut parent: Vec<usize> = (0..m).collect();
        for list in &touching {
            for w in list.windows(2) {
                let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; m];
        for ci in 0..m {
            let root = find(&mut parent, ci);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(ci);
        }
        let mut local = vec![0usize; m];
        for g in &groups {
            for (k, &ci) in g.iter().enumerate() {
                local[ci] = k;
            }
        }
        let mut grams: Vec<DMatrix<C64>> = groups
            .iter()
            .map(|g| DMatrix::zeros(g.len(), g.len()))
            .collect();
        for list in &touching {
            for &(ci, a) in list {
                for &(cj, b) in list {
                    let gi = slot[find(&mut parent, ci)];
                    grams[gi][(local[ci], local[cj])] += a * b.conj();
                }
            }
        }
        let components = groups
            .into_iter()
            .zip(grams)
            .map(|(g, gram)| (g, pseudo_inverse(&gram)))
            .collect();
        Self { system, components }
    }

    /// Projects `x` in place.
    pub fn project(&self, x: &mut [DMatrix<C64>]) {
        let r = self.system.residual(x);
        let mut y = vec![C64::new(0.0, 0.0); r.len()];
        for (ids, pinv) in &self.components {
            for (a, &ci) in ids.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (b, &cj) in ids.iter().enumerate() {
                    acc += pinv[(a, b)] * r[cj];
                }
                y[ci] = acc;
            }
        }
        self.system.add_adjoint(&y, -1.0, x);
    }
}

fn pseudo_inverse(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (w, v) = hermitian_eigen(m);
    let top = w.last().copied().unwrap_or(0.0);
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (k, &lam) in w.iter().enumerate() {
        if lam > 1e-12 * top && lam > 0.0 {
            let col = v.column(k);
            out += col * col.adjoint() * C64::new(1.0 / lam, 0.0);
        }
    }
    out
}

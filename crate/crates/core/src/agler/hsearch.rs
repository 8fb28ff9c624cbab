//! Gram search for `H1`, `H2` once `E` is known.
//!
//! With `L = |p|^2 - |p^|^2 - (1 - |z3|^2)|E|^2` (`p^ = z1^r z2^s p~`), find PSD
//! `G1` over the box `(N - 1, M, 1)` and `G2` over `(N, M - 1, 1)` such that
//! `(1 - |z1|^2) v1* G1 v1 + (1 - |z2|^2) v2* G2 v2 = L` coefficientwise.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, SesquiPoly, VectorPoly};
use crate::psd::{
    psd_factor, solve_feasibility, AffineConstraintSystem, BlockBasis, Evidence, GramCertificate,
    SolverOptions, Term,
};

#[derive(Clone, Debug)]
pub struct HSolution {
    pub h1: VectorPoly,
    pub h2: VectorPoly,
    pub grams: [GramCertificate; 2],
    pub evidence: Evidence,
}

/// Monomial boxes of `H1` and `H2` for `(N, M) = (n + r, m + s)`; `None` when empty.
pub fn h_boxes(nn: i32, mm: i32) -> [Option<MultiIndex>; 2] {
    let one = |d: MultiIndex| d.is_nonnegative().then_some(d);
    [
        one(MultiIndex::new(&[nn - 1, mm, 1])),
        one(MultiIndex::new(&[nn, mm - 1, 1])),
    ]
}

/// `|p|^2 - |z1^r z2^s p~|^2 - (1 - |z3|^2)|E|^2` as a polynomial in `z, conj(z)`.
pub fn identity_target(p: &AnalyticPoly, e: &VectorPoly, r: i32, s: i32) -> Result<SesquiPoly> {
    let d = p.degree();
    let hat = p.reflect(&MultiIndex::new(&[d.get(0) + r, d.get(1) + s, 1]))?;
    let mut l = SesquiPoly::mod_squared(p);
    l.add_outer(&hat, &hat, -1.0);
    let e3 = e.embed(3)?;
    l.add_scaled(&e3.norm_sq_sesqui().times_defect(2), -1.0);
    l.drop_noise();
    Ok(l)
}

fn empty_h(nn: i32, mm: i32, which: usize) -> VectorPoly {
    let d = if which == 0 {
        [(nn - 1).max(0), mm, 1]
    } else {
        [nn, (mm - 1).max(0), 1]
    };
    VectorPoly::empty(MultiIndex::new(&d))
}

/// Solves for `H1, H2` given `E` (`|E|^2 = |a|^2 - |b|^2` on the torus).
pub fn find_h(
    p: &AnalyticPoly,
    e: &VectorPoly,
    r: i32,
    s: i32,
    opts: &SolverOptions,
) -> Result<HSolution> {
    let d = p.degree();
    let (nn, mm) = (d.get(0) + r, d.get(1) + s);
    let target = identity_target(p, e, r, s)?;
    let boxes = h_boxes(nn, mm);
    let bases: Vec<Vec<MultiIndex>> = boxes
        .iter()
        .map(|b| b.map(|b| b.box_iter().collect()).unwrap_or_default())
        .collect();

    let mut groups: BTreeMap<(MultiIndex, MultiIndex), Vec<Term>> = BTreeMap::new();
    for (block, basis) in bases.iter().enumerate() {
        let shift = MultiIndex::unit(3, block);
        for (i, u) in basis.iter().enumerate() {
            for (j, w) in basis.iter().enumerate() {
                for (key, sign) in [((*u, *w), 1.0), ((*u + shift, *w + shift), -1.0)] {
                    groups.entry(key).or_default().push(Term {
                        block,
                        row: i,
                        col: j,
                        coeff: C64::new(sign, 0.0),
                    });
                }
            }
        }
    }
    let scale = target.max_abs_coeff().max(1.0);
    for ((u, w), c) in target.terms() {
        if !groups.contains_key(&(*u, *w)) && c.norm() > 1e-9 * scale {
            // no H can produce this coefficient: E is inconsistent with p
            return Err(Error::Infeasible(Box::new(Evidence {
                residual: c.norm() / scale,
                iterations: 0,
                trace: Vec::new(),
                polished: false,
            })));
        }
    }
    // solved for p / |p|_1, so the solver tolerance is relative to |p|_1^2
    let unit = match p.one_norm() {
        n if n > 0.0 => n * n,
        _ => 1.0,
    };
    let mut system = AffineConstraintSystem::new(bases.iter().map(Vec::len).collect());
    for ((u, w), terms) in groups {
        system.push(terms, target.coeff(&u, &w) / unit);
    }
    let blocks: Vec<BlockBasis> = bases
        .iter()
        .map(|b| BlockBasis {
            nvars: 3,
            basis: b.clone(),
        })
        .collect();
    let mut solution = solve_feasibility(&system, &blocks, opts)
        .map_err(|ev| Error::Infeasible(Box::new(ev)))?;
    for g in &mut solution.blocks {
        *g = GramCertificate::new(g.nvars, g.basis.clone(), &g.matrix * C64::new(unit, 0.0));
    }
    let mut hs = Vec::with_capacity(2);
    for (k, g) in solution.blocks.iter().enumerate() {
        let h = match boxes[k] {
            Some(b) => psd_factor(g)?.with_degree(b)?,
            None => empty_h(nn, mm, k),
        };
        hs.push(h);
    }
    let h2 = hs.pop().expect("two blocks");
    let h1 = hs.pop().expect("two blocks");
    let mut grams = solution.blocks.into_iter();
    Ok(HSolution {
        h1,
        h2,
        grams: [grams.next().unwrap(), grams.next().unwrap()],
        evidence: solution.evidence,
    })
}

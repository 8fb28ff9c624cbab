//! Sums of squares for strictly positive trig polynomials on the 2-torus.
//!
//! Three routes produce `E` with `||E||^2 = t`:
//! - degree `(n, 1)`: the two-squares construction via matrix spectral
//!   factorization (exactly two squares);
//! - degree `(n, 0)` or `(0, m)`: scalar spectral factorization (one square);
//! - otherwise a Gram-matrix feasibility search over the monomial box.
//!
//! [`multiplier_search`] enlarges the box `(n + r, m + s)` diagonal by
//! diagonal until one of them succeeds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::factor::{lemma_two_squares, scalar_fejer_riesz};
use crate::index::MultiIndex;
use crate::poly::{AnalyticPoly, TrigPoly, VectorPoly};
use crate::psd::{
    psd_factor, solve_feasibility, AffineConstraintSystem, BlockBasis, Evidence, GramCertificate,
    SolverOptions, Term,
};

/// Grid used by the strict positivity gate.
pub const POSITIVITY_GRID: usize = 256;
/// Certified minima below this raise a conditioning warning.
pub const CONDITIONING_WARN: f64 = 1e-6;

/// How a decomposition was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    Lemma,
    Scalar,
    Gram,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Lemma => "lemma",
            Route::Scalar => "scalar",
            Route::Gram => "gram",
        }
    }
}

/// Result of the strict positivity gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Positivity {
    pub grid_min: f64,
    /// Grid minimum minus the Lipschitz slack; positive means certified.
    pub certified_min: f64,
    pub warnings: Vec<String>,
}

/// Rejects `t` unless its grid minimum is positive.
pub fn positivity_gate(t: &TrigPoly) -> Result<Positivity> {
    let (grid_min, certified_min) = t.certified_lower_bound(POSITIVITY_GRID);
    if !(grid_min > 0.0) {
        return Err(Error::NotPositive { min: grid_min });
    }
    let mut warnings = Vec::new();
    if certified_min < CONDITIONING_WARN {
        warnings.push(format!(
            "ill-conditioned: certified minimum {certified_min:e} (grid minimum {grid_min:e})"
        ));
    }
    Ok(Positivity {
        grid_min,
        certified_min,
        warnings,
    })
}

/// A decomposition `||e||^2 = t` with its provenance.
#[derive(Clone, Debug)]
pub struct SosOutput {
    pub e: VectorPoly,
    pub route: Route,
    /// Max coefficient of `||e||^2 - t`.
    pub residual: f64,
    /// Diagonal shift used by a spectral factorization (0 if none).
    pub shift: f64,
    pub gram: Option<GramCertificate>,
    pub evidence: Option<Evidence>,
}

/// Gram-matrix search for `t = ||E||^2` with `E` over the monomial box `degree`.
///
/// The number of squares is the numerical rank of the Gram block.
pub fn trig_sos(t: &TrigPoly, degree: MultiIndex, opts: &SolverOptions) -> Result<SosOutput> {
    check_shape(t, &degree)?;
    positivity_gate(t)?;
    gram_sos(t, degree, opts)
}

fn check_shape(t: &TrigPoly, degree: &MultiIndex) -> Result<()> {
    if t.nvars() != 2 || degree.len() != 2 {
        return Err(Error::VariableCount {
            expected: 2,
            found: if t.nvars() != 2 { t.nvars() } else { degree.len() },
        });
    }
    let occupied = t.degree();
    for var in 0..2 {
        if occupied.get(var) > degree.get(var) {
            return Err(Error::DegreeTooHigh {
                var: var + 1,
                found: occupied.get(var),
                allowed: degree.get(var),
            });
        }
    }
    Ok(())
}

/// The coefficient-matching system `sum_{b_i - b_j = k} G[i, j] = t_k`.
pub fn gram_system(t: &TrigPoly, basis: &[MultiIndex]) -> AffineConstraintSystem {
    let mut groups: BTreeMap<MultiIndex, Vec<Term>> = BTreeMap::new();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            groups.entry(*a - *b).or_default().push(Term {
                block: 0,
                row: i,
                col: j,
                coeff: C64::new(1.0, 0.0),
            });
        }
    }
    let mut system = AffineConstraintSystem::new(alloc::vec![basis.len()]);
    for (k, terms) in groups {
        system.push(terms, t.coeff(&k));
    }
    system
}

fn gram_sos(t: &TrigPoly, degree: MultiIndex, opts: &SolverOptions) -> Result<SosOutput> {
    let basis: Vec<MultiIndex> = degree.box_iter().collect();
    let system = gram_system(t, &basis);
    let blocks = [BlockBasis { nvars: 2, basis }];
    let solution = solve_feasibility(&system, &blocks, opts)
        .map_err(|ev| Error::Infeasible(alloc::boxed::Box::new(ev)))?;
    let gram = solution.blocks.into_iter().next().expect("one block");
    let e = psd_factor(&gram)?.with_degree(degree)?;
    let residual = e.norm_sq_trig().distance(t);
    Ok(SosOutput {
        e,
        route: Route::Gram,
        residual,
        shift: 0.0,
        gram: Some(gram),
        evidence: Some(solution.evidence),
    })
}

fn lemma_sos(t: &TrigPoly, n: i32) -> Result<SosOutput> {
    let out = lemma_two_squares(t, n)?;
    let residual = out.e.norm_sq_trig().distance(t);
    Ok(SosOutput {
        e: out.e,
        route: Route::Lemma,
        residual,
        shift: out.shift,
        gram: None,
        evidence: None,
    })
}

fn transpose(t: &TrigPoly) -> TrigPoly {
    TrigPoly::from_terms(
        2,
        t.terms()
            .map(|(k, c)| (MultiIndex::new(&[k.get(1), k.get(0)]), *c)),
    )
}

/// One square via scalar factorization, for `t` depending on `z_var` only.
fn scalar_sos(t: &TrigPoly, degree: MultiIndex, var: usize) -> Result<SosOutput> {
    let t1 = if var == 0 {
        t.z2_slice(0)
    } else {
        transpose(t).z2_slice(0)
    };
    let q = scalar_fejer_riesz(&t1, degree.get(var))?;
    let terms = q.terms().map(|(k, c)| {
        let mut idx = MultiIndex::zero(2);
        idx = idx.with(var, k.get(0));
        (idx, *c)
    });
    let e = VectorPoly::new(
        degree,
        alloc::vec![AnalyticPoly::from_terms(degree, terms)?],
    )?;
    let residual = e.norm_sq_trig().distance(t);
    Ok(SosOutput {
        e,
        route: Route::Scalar,
        residual,
        shift: 0.0,
        gram: None,
        evidence: None,
    })
}

/// One `(r, s)` attempt of the multiplier search.
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub r: i32,
    pub s: i32,
    pub route: Route,
    pub success: bool,
    /// Coefficient residual on success, best solver residual otherwise.
    pub residual: f64,
    pub iterations: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MultiplierOutput {
    pub r: i32,
    pub s: i32,
    pub sos: SosOutput,
    pub positivity: Positivity,
    /// Every attempt in search order, ending with the successful one.
    pub trace: Vec<Attempt>,
}

/// Accepted coefficient residual of a decomposition, relative to `max(1, |t|_inf)`.
pub const SOS_TOL: f64 = 1e-9;

/// Searches `(r, s)` with `r + s <= max_total`, ordered by `r + s` then `r`,
/// for a decomposition of `t` (declared degree `(n, m)`) into squares of
/// degree `(n + r, m + s)`.
pub fn multiplier_search(
    t: &TrigPoly,
    n: i32,
    m: i32,
    max_total: i32,
    opts: &SolverOptions,
) -> Result<MultiplierOutput> {
    let degree = MultiIndex::new(&[n, m]);
    check_shape(t, &degree)?;
    let positivity = positivity_gate(t)?;
    let scale = t.max_abs_coeff().max(1.0);
    let mut trace = Vec::new();

    for total in 0..=max_total {
        for r in 0..=total {
            let s = total - r;
            let box_rs = MultiIndex::new(&[n + r, m + s]);
            let mut candidates: Vec<Route> = Vec::new();
            if total == 0 {
                if m == 1 {
                    candidates.push(Route::Lemma);
                } else if m == 0 || n == 0 {
                    candidates.push(Route::Scalar);
                }
            }
            candidates.push(Route::Gram);
            for route in candidates {
                let outcome = match route {
                    Route::Lemma => lemma_sos(t, n),
                    Route::Scalar => scalar_sos(t, degree, if m == 0 { 0 } else { 1 }),
                    Route::Gram => gram_sos(t, box_rs, opts),
                };
                match outcome {
                    Ok(sos) if sos.residual <= SOS_TOL * scale => {
                        trace.push(Attempt {
                            r,
                            s,
                            route,
                            success: true,
                            residual: sos.residual,
                            iterations: sos.evidence.as_ref().map_or(0, |e| e.iterations),
                            note: None,
                        });
                        return Ok(MultiplierOutput {
                            r,
                            s,
                            sos,
                            positivity,
                            trace,
                        });
                    }
                    Ok(sos) => trace.push(Attempt {
                        r,
                        s,
                        route,
                        success: false,
                        residual: sos.residual,
                        iterations: sos.evidence.as_ref().map_or(0, |e| e.iterations),
                        note: Some(String::from("residual above tolerance")),
                    }),
                    Err(Error::Infeasible(ev)) => trace.push(Attempt {
                        r,
                        s,
                        route,
                        success: false,
                        residual: ev.residual,
                        iterations: ev.iterations,
                        note: Some(String::from("no proof of infeasibility")),
                    }),
                    Err(err) => trace.push(Attempt {
                        r,
                        s,
                        route,
                        success: false,
                        residual: f64::NAN,
                        iterations: 0,
                        note: Some(format!("{err}")),
                    }),
                }
            }
        }
    }
    Err(Error::Exhausted {
        steps: trace.len(),
        attempts: trace,
    })
}

/// Entrywise reflection at a common box: `z^box conj(E(1 / conj z))`.
pub fn reflect_vector(e: &VectorPoly, degree: MultiIndex) -> Result<VectorPoly> {
    e.reflect(&degree)
}

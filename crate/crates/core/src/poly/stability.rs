//! Certified-margin test for "no zeros on the closed polydisk".
//!
//! With `h_k` the restriction of `p` to its first `k` variables (the rest set
//! to zero), `p` is zero-free on the closed polydisk iff for every `k`:
//!
//! * `h_k` is zero-free on the torus `T^k`, and
//! * the univariate `v -> h_k(1, .., 1, v)` has no zeros in the open disk.
//!
//! The torus condition is certified by branch and bound with a second-order
//! Taylor bound in the angles; the univariate one by root finding.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::poly::{roots, AnalyticPoly};

/// Evaluation budget for one torus branch-and-bound run.
const TORUS_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Stability {
    /// Zero-free; `min_modulus` is the minimum of `|p|` found on the torus.
    Stable { min_modulus: f64 },
    /// A point of the closed polydisk where `|p| <= margin_tol`.
    Unstable { witness: Vec<C64>, modulus: f64 },
    /// Neither outcome could be certified within the budget.
    Inconclusive { reason: String },
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable { .. })
    }
}

enum TorusOutcome {
    Certified { min: f64 },
    Witness { point: Vec<C64>, modulus: f64 },
    Exhausted { min: f64 },
}

fn torus_point(theta: &[f64], nvars: usize) -> Vec<C64> {
    let mut z = vec![C64::new(0.0, 0.0); nvars];
    for (v, t) in theta.iter().enumerate() {
        z[v] = C64::from_polar(1.0, *t);
    }
    z
}

/// `q` flattened to (exponents, coefficient) pairs for fast evaluation.
struct Flat {
    terms: Vec<([i32; 3], C64)>,
    degree: [usize; 3],
}

impl Flat {
    fn new(q: &AnalyticPoly, active: usize) -> Self {
        let mut degree = [0usize; 3];
        let terms = q
            .terms()
            .map(|(i, c)| {
                let mut a = [0i32; 3];
                for (v, slot) in a.iter_mut().enumerate().take(active) {
                    *slot = i.get(v);
                    degree[v] = degree[v].max(*slot as usize);
                }
                (a, *c)
            })
            .collect();
        Self { terms, degree }
    }

    /// Value and angular gradient `d/d theta_v = i z_v d/dz_v` at `e^{i theta}`.
    fn eval(&self, theta: &[f64], pw: &mut [Vec<C64>; 3]) -> (C64, [C64; 3]) {
        for (v, t) in theta.iter().enumerate() {
            let step = C64::from_polar(1.0, *t);
            let row = &mut pw[v];
            row.clear();
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=self.degree[v] {
                row.push(acc);
                acc *= step;
            }
        }
        let mut value = C64::new(0.0, 0.0);
        let mut grad = [C64::new(0.0, 0.0); 3];
        for (a, c) in &self.terms {
            let mut term = *c;
            for (v, &e) in a.iter().enumerate().take(theta.len()) {
                term *= pw[v][e as usize];
            }
            value += term;
            for v in 0..theta.len() {
                grad[v] += term * C64::new(0.0, a[v] as f64);
            }
        }
        (value, grad)
    }
}

/// Branch and bound over angle cells of the torus in the first `active` variables.
///
/// A cell of half-width `hw` around `c` is cleared when
/// `|q(c)| - hw sum_v |d_v q(c)| - hw^2 K / 2 > 0`, with
/// `K = sum_a |c_a| |a|_1^2` bounding every second angular derivative sum.
fn certify_torus(q: &AnalyticPoly, active: usize, grid: usize, margin_tol: f64) -> TorusOutcome {
    let flat = Flat::new(q, active);
    let curvature: f64 = flat
        .terms
        .iter()
        .map(|(a, c)| {
            let l1: i32 = a.iter().take(active).sum();
            c.norm() * (l1 * l1) as f64
        })
        .sum();
    let h = 2.0 * core::f64::consts::PI / grid as f64;
    let mut stack: Vec<([f64; 3], f64)> = Vec::new();
    let total = grid.pow(active as u32);
    for flat_index in 0..total {
        let mut c = [0.0; 3];
        let mut r = flat_index;
        for slot in c.iter_mut().take(active) {
            *slot = (r % grid) as f64 * h;
            r /= grid;
        }
        stack.push((c, h / 2.0));
    }
    let mut pw: [Vec<C64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut min = f64::INFINITY;
    let mut evals = 0usize;
    while let Some((c, hw)) = stack.pop() {
        evals += 1;
        if evals > TORUS_BUDGET {
            return TorusOutcome::Exhausted { min };
        }
        let (value, grad) = flat.eval(&c[..active], &mut pw);
        let m = value.norm();
        min = min.min(m);
        if m <= margin_tol {
            return TorusOutcome::Witness {
                point: torus_point(&c[..active], q.nvars()),
                modulus: m,
            };
        }
        let slope: f64 = grad.iter().take(active).map(|g| g.norm()).sum();
        if m > hw * slope + 0.5 * hw * hw * curvature {
            continue;
        }
        let child = hw / 2.0;
        for mask in 0..(1usize << active) {
            let mut cc = c;
            for (v, slot) in cc.iter_mut().enumerate().take(active) {
                *slot += if mask >> v & 1 == 1 { child } else { -child };
            }
            stack.push((cc, child));
        }
    }
    TorusOutcome::Certified { min }
}

/// Decides stability of `p` on the closed polydisk up to a certified margin.
///
/// `grid_density` is the initial number of angle cells per variable (at least 8).
pub fn stability_check(p: &AnalyticPoly, grid_density: usize, margin_tol: f64) -> Stability {
    assert!(grid_density >= 8, "grid density must be at least 8");
    let n = p.nvars();
    if p.is_zero() {
        return Stability::Unstable {
            witness: vec![C64::new(0.0, 0.0); n],
            modulus: 0.0,
        };
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut min_modulus = f64::INFINITY;
    for k in 1..=n {
        let mut h = p.clone();
        for v in k..n {
            h = h.fix_var(v, zero);
        }
        match certify_torus(&h, k, grid_density, margin_tol) {
            TorusOutcome::Certified { min } => {
                if k == n {
                    min_modulus = min;
                }
            }
            TorusOutcome::Witness { point, modulus } => {
                return Stability::Unstable {
                    witness: point,
                    modulus,
                }
            }
            TorusOutcome::Exhausted { min } => {
                return Stability::Inconclusive {
                    reason: format!(
                        "torus check in {k} variable(s) exhausted its budget (grid minimum {min:e})"
                    ),
                }
            }
        }
        let mut u = h.clone();
        for v in 0..k - 1 {
            u = u.fix_var(v, one);
        }
        for r in roots::roots(&u.univariate_coeffs(k - 1)) {
            if r.norm() < 1.0 {
                let mut witness = vec![zero; n];
                for w in witness.iter_mut().take(k - 1) {
                    *w = one;
                }
                witness[k - 1] = r;
                let modulus = p.eval(&witness).norm();
                if modulus <= margin_tol.max(1e-9 * p.one_norm()) {
                    return Stability::Unstable { witness, modulus };
                }
                return Stability::Inconclusive {
                    reason: format!("root {r} inside the disk could not be confirmed"),
                };
            }
        }
    }
    Stability::Stable { min_modulus }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;

    fn poly(degree: &[i32], terms: &[(&[i32], f64)]) -> AnalyticPoly {
        AnalyticPoly::from_terms(
            MultiIndex::new(degree),
            terms
                .iter()
                .map(|(i, c)| (MultiIndex::new(i), C64::new(*c, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn two_minus_z1_is_stable() {
        let p = poly(&[1, 0, 0], &[(&[0, 0, 0], 2.0), (&[1, 0, 0], -1.0)]);
        match stability_check(&p, 16, 1e-9) {
            Stability::Stable { min_modulus } => assert!((min_modulus - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn one_minus_z1_has_boundary_zero() {
        let p = poly(&[1, 0, 0], &[(&[0, 0, 0], 1.0), (&[1, 0, 0], -1.0)]);
        match stability_check(&p, 16, 1e-9) {
            Stability::Unstable { witness, modulus } => {
                assert!(modulus <= 1e-9);
                assert!((witness[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn four_minus_sum_is_stable() {
        let p = poly(
            &[1, 1, 1],
            &[
                (&[0, 0, 0], 4.0),
                (&[1, 0, 0], -1.0),
                (&[0, 1, 0], -1.0),
                (&[0, 0, 1], -1.0),
            ],
        );
        match stability_check(&p, 16, 1e-9) {
            Stability::Stable { min_modulus } => {
                // coefficient bound |p| >= 4 - 3, attained at (1, 1, 1)
                assert!((min_modulus - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interior_zero_is_found() {
        // zero-free on the torus, vanishes at z2 = 1, z3 = 1/4
        let p = poly(&[0, 1, 1], &[(&[0, 0, 0], 1.0), (&[0, 1, 1], -4.0)]);
        assert!(matches!(
            stability_check(&p, 16, 1e-9),
            Stability::Unstable { .. }
        ));
    }

    #[test]
    fn zero_inside_but_not_on_torus() {
        // 2 z1 - 1 + 0 z2: zero at z1 = 1/2
        let p = poly(&[1, 1], &[(&[0, 0], -1.0), (&[1, 0], 2.0)]);
        assert!(matches!(
            stability_check(&p, 16, 1e-9),
            Stability::Unstable { .. }
        ));
    }
}

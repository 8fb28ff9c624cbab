//! Seeded random instances: stable polynomials and near-tight `(a, b)` pairs.

use std::f64::consts::PI;

use agler_core::poly::{stability_check, AnalyticPoly};
use agler_core::{MultiIndex, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Attempts before [`gen_stable`] gives up.
pub const MAX_RETRIES: usize = 100;
/// Points per variable for torus extrema.
const EXTREMA_GRID: usize = 96;

#[derive(Debug, Clone, PartialEq)]
pub struct GenError(pub String);

impl std::fmt::Display for GenError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GenError {}

fn rand_unit_disk(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

fn rand_poly(rng: &mut ChaCha8Rng, d: MultiIndex) -> AnalyticPoly {
    let dense: Vec<C64> = (0..d.box_size()).map(|_| rand_unit_disk(rng)).collect();
    AnalyticPoly::from_dense(d, &dense)
}

/// `prod (c_i - z_var)` with roots of modulus in `[1.3, 3]`.
fn root_product(rng: &mut ChaCha8Rng, d: MultiIndex, var: usize, count: i32) -> AnalyticPoly {
    let mut f = AnalyticPoly::constant(d, C64::new(1.0, 0.0));
    if count == 0 {
        return f;
    }
    let z = AnalyticPoly::monomial(d, MultiIndex::unit(2, var), C64::new(1.0, 0.0));
    for _ in 0..count {
        let c = C64::from_polar(rng.gen_range(1.3..3.0), rng.gen_range(0.0..2.0 * PI));
        f = f.mul(&AnalyticPoly::constant(d, c).sub(&z)).with_degree(d).expect("degree fits");
    }
    f
}

/// Lower and upper bounds for `|f|` on the 2-torus: grid extrema widened by
/// the Lipschitz constant over half a grid cell.
pub fn torus_modulus_bounds(f: &AnalyticPoly) -> (f64, f64) {
    let g = EXTREMA_GRID;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..g {
        for j in 0..g {
            let z = [
                C64::from_polar(1.0, 2.0 * PI * i as f64 / g as f64),
                C64::from_polar(1.0, 2.0 * PI * j as f64 / g as f64),
            ];
            let v = f.eval(&z).norm();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let slack = (PI / g as f64) * (f.derivative_bound(0) + f.derivative_bound(1));
    ((lo - slack).max(0.0), (hi + slack).min(f.one_norm()))
}

/// Stable `a` of degree `(n, m)`: a product of linear factors with roots
/// outside the closed disk, plus a perturbation small enough to keep it stable.
pub fn stable_a(rng: &mut ChaCha8Rng, n: i32, m: i32) -> Result<AnalyticPoly, GenError> {
    let d = MultiIndex::new(&[n, m]);
    for _ in 0..MAX_RETRIES {
        let a0 = root_product(rng, d, 0, n).mul(&root_product(rng, d, 1, m)).with_degree(d).expect("degree fits");
        let (lo, _) = torus_modulus_bounds(&a0);
        let eta = rng.gen_range(0.05..0.9) * lo / d.box_size() as f64;
        let a = a0.add(&rand_poly(rng, d).scale(C64::new(eta, 0.0)));
        if stability_check(&a, 16, 1e-12).is_stable() && torus_modulus_bounds(&a).0 > 0.0 {
            return Ok(a);
        }
    }
    Err(GenError(format!("no stable instance of degree ({n}, {m}) after {MAX_RETRIES} attempts")))
}

/// Random `p = a + b z3` of degree `(n, m, 1)` with no zeros on the closed
/// tridisk: `a` stable and `b = lambda (min|a| / max|c|) c` for random `c`,
/// so `|b| < |a|` on the closed bidisk. Deterministic in `seed`.
pub fn gen_stable(n: i32, m: i32, seed: u64, lambda: f64) -> Result<AnalyticPoly, GenError> {
    if !(0.0..1.0).contains(&lambda) || n < 0 || m < 0 {
        return Err(GenError(format!("need n, m >= 0 and 0 <= lambda < 1, got ({n}, {m}, {lambda})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = MultiIndex::new(&[n, m]);
    for _ in 0..MAX_RETRIES {
        let a = stable_a(&mut rng, n, m)?;
        let c = rand_poly(&mut rng, d);
        let (amin, _) = torus_modulus_bounds(&a);
        let (_, cmax) = torus_modulus_bounds(&c);
        let b = if lambda == 0.0 || cmax == 0.0 {
            AnalyticPoly::zero(d)
        } else {
            c.scale(C64::new(lambda * amin / cmax, 0.0))
        };
        let p = AnalyticPoly::join_z3(&a, &b);
        if stability_check(&p, 16, 1e-12).is_stable() {
            return Ok(p);
        }
    }
    Err(GenError(format!("no stable instance of degree ({n}, {m}, 1) after {MAX_RETRIES} attempts")))
}

/// Near-tight pair: stable `a` and `b` with `max |b| / |a|` over the torus
/// grid equal to `1 - delta u`, `u` uniform in `(0, 1]`.
pub fn near_tight_pair(n: i32, m: i32, seed: u64, delta: f64) -> Result<(AnalyticPoly, AnalyticPoly, f64), GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = MultiIndex::new(&[n, m]);
    let a = stable_a(&mut rng, n, m)?;
    let c = rand_poly(&mut rng, d);
    let g = EXTREMA_GRID;
    let mut worst = 0.0f64;
    for i in 0..g {
        for j in 0..g {
            let z = [
                C64::from_polar(1.0, 2.0 * PI * i as f64 / g as f64),
                C64::from_polar(1.0, 2.0 * PI * j as f64 / g as f64),
            ];
            worst = worst.max(c.eval(&z).norm() / a.eval(&z).norm());
        }
    }
    let ratio = 1.0 - delta * (1.0 - rng.gen::<f64>());
    if worst == 0.0 {
        return Ok((a, AnalyticPoly::zero(d), 0.0));
    }
    Ok((a, c.scale(C64::new(ratio / worst, 0.0)), ratio))
}

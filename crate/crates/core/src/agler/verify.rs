//! Independent verification of an [`AglerCertificate`].
//!
//! Everything is re-derived from `p` and the certificate polynomials; the
//! construction metadata is never read.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::agler::AglerCertificate;
use crate::error::Result;
use crate::index::MultiIndex;
use crate::poly::{stability_check, SesquiPoly, Stability, VectorPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Coefficient tolerance, relative to `|p|_1^2`.
    pub tol: f64,
    /// Sample points per point check.
    pub samples: usize,
    pub stability_grid: usize,
    pub margin_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            samples: 256,
            stability_grid: 16,
            margin_tol: 1e-12,
        }
    }
}

/// One line of a report. Checks with `hard == false` are informational.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub hard: bool,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub pass: bool,
    /// Max coefficient of the identity residual.
    pub coefficient_residual: f64,
    /// Max pointwise residual over all samples.
    pub point_residual: f64,
    /// `|p|_1^2`.
    pub scale: f64,
    pub square_counts: [usize; 3],
    pub checks: Vec<Check>,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `|p|^2 - |z1^r z2^s p~|^2 - sum_j (1 - |z_j|^2)|H_j|^2 - (1 - |z3|^2)|E|^2`.
pub fn identity_residual(cert: &AglerCertificate) -> Result<SesquiPoly> {
    let p = &cert.p;
    let hat = p.reflect(&cert.reflect_box())?;
    let mut res = SesquiPoly::mod_squared(p);
    res.add_outer(&hat, &hat, -1.0);
    for (var, h) in [(0, &cert.h1), (1, &cert.h2)] {
        let mut sq = SesquiPoly::zero(3);
        for f in h.entries() {
            sq.add_outer(f, f, 1.0);
        }
        res.add_scaled(&sq.times_defect(var), -1.0);
    }
    let mut sq = SesquiPoly::zero(3);
    for f in cert.e.entries() {
        let f3 = f.embed(3)?;
        sq.add_outer(&f3, &f3, 1.0);
    }
    res.add_scaled(&sq.times_defect(2), -1.0);
    Ok(res)
}

/// Deterministic low-discrepancy points: `z1, z2` on the circle, `z3` in the
/// open disk, and with `interior` also `z1, z2` in the open disk.
pub fn quasi_random_points(count: usize, interior: bool) -> Vec<[C64; 3]> {
    // additive recurrence with the generalized golden ratio in dimension 5
    let g: f64 = 1.2207440846057596;
    let mut alpha = [0.0; 5];
    let mut x = 1.0;
    for a in alpha.iter_mut() {
        x /= g;
        *a = x;
    }
    let tau = core::f64::consts::TAU;
    (1..=count)
        .map(|i| {
            let u: Vec<f64> = alpha.iter().map(|a| libm::fmod(0.5 + a * i as f64, 1.0)).collect();
            let rad = |x: f64| libm::sqrt(x) * 0.999;
            let z3 = C64::from_polar(rad(u[2]), tau * u[3]);
            let (r1, r2) = if interior {
                (rad(u[4]), rad(libm::fmod(u[4] + u[2], 1.0)))
            } else {
                (1.0, 1.0)
            };
            [
                C64::from_polar(r1, tau * u[0]),
                C64::from_polar(r2, tau * u[1]),
                z3,
            ]
        })
        .collect()
}

fn norm_sq(v: &VectorPoly, z: &[C64]) -> f64 {
    v.entries().iter().map(|f| f.eval(z).norm_sqr()).sum()
}

fn point_residual(cert: &AglerCertificate, z: &[C64; 3]) -> Result<f64> {
    let p = &cert.p;
    let hat = p.reflect(&cert.reflect_box())?;
    let lhs = p.eval(z).norm_sqr() - hat.eval(z).norm_sqr();
    let d = |k: usize| 1.0 - z[k].norm_sqr();
    let rhs = d(0) * norm_sq(&cert.h1, z)
        + d(1) * norm_sq(&cert.h2, z)
        + d(2) * norm_sq(&cert.e, &z[..2]);
    Ok((lhs - rhs).abs())
}

fn occupied_within(v: &VectorPoly, nvars: usize, cap: &MultiIndex) -> bool {
    v.nvars() == nvars
        && v.entries().iter().all(|f| {
            f.is_zero() || (cap.is_nonnegative() && f.occupied_degree().le_box(cap))
        })
}

fn nonzero_squares(v: &VectorPoly) -> usize {
    v.entries().iter().filter(|f| !f.is_zero()).count()
}

fn hard(name: &str, passed: bool, value: f64, limit: f64, detail: String) -> Check {
    Check {
        name: name.into(),
        hard: true,
        passed,
        value,
        limit,
        detail,
    }
}

fn info(name: &str, passed: bool, value: f64, limit: f64, detail: String) -> Check {
    Check {
        name: name.into(),
        hard: false,
        passed,
        value,
        limit,
        detail,
    }
}

/// Checks `cert` against `p` and the degree and square-count caps.
pub fn verify_certificate(cert: &AglerCertificate, opts: &VerifyOptions) -> Report {
    let mut checks = Vec::new();
    let p = &cert.p;
    let d = p.degree();
    let shape_ok = p.nvars() == 3 && d.get(2) == 1;
    checks.push(hard(
        "p_shape",
        shape_ok,
        d.get(2) as f64,
        1.0,
        format!("declared degree {:?}", d.as_slice()),
    ));
    let mult_ok = cert.r >= 0 && cert.s >= 0;
    checks.push(hard(
        "multiplier",
        mult_ok,
        (cert.r + cert.s) as f64,
        f64::INFINITY,
        format!("r = {}, s = {}", cert.r, cert.s),
    ));
    let square_counts = [
        nonzero_squares(&cert.e),
        nonzero_squares(&cert.h1),
        nonzero_squares(&cert.h2),
    ];
    let one_norm = p.one_norm();
    let scale = one_norm * one_norm;
    if !(shape_ok && mult_ok) {
        return Report {
            pass: false,
            coefficient_residual: f64::NAN,
            point_residual: f64::NAN,
            scale,
            square_counts,
            checks,
        };
    }

    let (nn, mm) = cert.big_degree();
    let caps = [
        MultiIndex::new(&[nn, mm]),
        MultiIndex::new(&[nn - 1, mm, 1]),
        MultiIndex::new(&[nn, mm - 1, 1]),
    ];
    for (name, v, nvars, cap) in [
        ("e_degree", &cert.e, 2, &caps[0]),
        ("h1_degree", &cert.h1, 3, &caps[1]),
        ("h2_degree", &cert.h2, 3, &caps[2]),
    ] {
        checks.push(hard(
            name,
            occupied_within(v, nvars, cap),
            f64::NAN,
            f64::NAN,
            format!("cap {:?}", cap.as_slice()),
        ));
    }
    // the z_j-square count is at most d_j prod_{k != j} (d_k + 1) with d = (N, M, 1)
    let dims = [nn.max(0) as usize, mm.max(0) as usize, 1usize];
    let cap_for = |j: usize| -> usize {
        dims[j] * (0..3).filter(|&k| k != j).map(|k| dims[k] + 1).product::<usize>()
    };
    for (name, count, j) in [
        ("e_squares", square_counts[0], 2),
        ("h1_squares", square_counts[1], 0),
        ("h2_squares", square_counts[2], 1),
    ] {
        let cap = cap_for(j);
        checks.push(hard(
            name,
            count <= cap,
            count as f64,
            cap as f64,
            format!("{count} squares, cap {cap}"),
        ));
    }
    if cert.r == 0 && cert.s == 0 && d.get(1) == 1 {
        let n = d.get(0) as f64;
        for (name, count, expected) in [
            ("reference_e_squares", square_counts[0], 2.0),
            ("reference_h1_squares", square_counts[1], 4.0 * (n - 1.0)),
            ("reference_h2_squares", square_counts[2], 2.0 * (n + 1.0)),
        ] {
            checks.push(info(
                name,
                count as f64 <= expected,
                count as f64,
                expected,
                String::from("published count for degree (n, 1, 1); not enforced"),
            ));
        }
    }

    let limit = opts.tol * scale;
    let coefficient_residual = match identity_residual(cert) {
        Ok(r) => r
            .terms()
            .map(|(_, c)| c.norm())
            .fold(0.0, |acc: f64, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) }),
        Err(_) => f64::NAN,
    };
    checks.push(hard(
        "coefficient_residual",
        coefficient_residual <= limit,
        coefficient_residual,
        limit,
        String::from("max coefficient of the identity residual"),
    ));

    // a coefficient residual below `limit` moves a point value by at most
    // `limit` times the number of monomial pairs in the box
    let pairs = MultiIndex::new(&[nn, mm, 1]).box_size();
    let point_limit = limit * (pairs * pairs) as f64;
    let mut point_max: f64 = 0.0;
    for (name, interior) in [("points_torus2_disk", false), ("points_tridisk", true)] {
        let mut worst: f64 = 0.0;
        for z in quasi_random_points(opts.samples, interior) {
            let r = point_residual(cert, &z).unwrap_or(f64::NAN);
            worst = if r.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(r) };
        }
        point_max = if worst.is_nan() { f64::NAN } else { point_max.max(worst) };
        checks.push(hard(
            name,
            worst <= point_limit,
            worst,
            point_limit,
            format!("{} deterministic samples", opts.samples),
        ));
    }

    let stability = stability_check(p, opts.stability_grid.max(8), opts.margin_tol);
    let (ok, value, detail) = match &stability {
        Stability::Stable { min_modulus } => (true, *min_modulus, String::from("stable")),
        Stability::Unstable { witness, modulus } => {
            (false, *modulus, format!("zero near {witness:?}"))
        }
        Stability::Inconclusive { reason } => (false, f64::NAN, format!("inconclusive: {reason}")),
    };
    checks.push(info("stability", ok, value, 0.0, detail));

    let pass = checks.iter().filter(|c| c.hard).all(|c| c.passed);
    Report {
        pass,
        coefficient_residual,
        point_residual: point_max,
        scale,
        square_counts,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agler::Metadata;
    use crate::poly::AnalyticPoly;
    use alloc::vec;

    fn idx(e: &[i32]) -> MultiIndex {
        MultiIndex::new(e)
    }

    /// `1 - |z1 z2 z3|^2 = (1 - |z1|^2) + (1 - |z2|^2)|z1|^2 + (1 - |z3|^2)|z1 z2|^2`.
    fn telescoping() -> AglerCertificate {
        let one = C64::new(1.0, 0.0);
        let d3 = idx(&[1, 1, 1]);
        let d2 = idx(&[1, 1]);
        let h1box = idx(&[0, 1, 1]);
        let h2box = idx(&[1, 0, 1]);
        AglerCertificate {
            p: AnalyticPoly::constant(d3, one),
            r: 0,
            s: 0,
            e: VectorPoly::new(d2, vec![AnalyticPoly::monomial(d2, d2, one)]).unwrap(),
            h1: VectorPoly::new(h1box, vec![AnalyticPoly::constant(h1box, one)]).unwrap(),
            h2: VectorPoly::new(h2box, vec![AnalyticPoly::monomial(h2box, idx(&[1, 0, 0]), one)])
                .unwrap(),
            metadata: Metadata::default(),
        }
    }

    #[test]
    fn telescoping_passes_exactly() {
        let report = verify_certificate(&telescoping(), &VerifyOptions::default());
        assert!(report.pass, "{report:?}");
        assert_eq!(report.coefficient_residual, 0.0);
        assert_eq!(report.square_counts, [1, 1, 1]);
    }

    #[test]
    fn tampered_h1_fails() {
        let mut cert = telescoping();
        let h1box = idx(&[0, 1, 1]);
        cert.h1 = VectorPoly::new(
            h1box,
            vec![AnalyticPoly::constant(h1box, C64::new(1.01, 0.0))],
        )
        .unwrap();
        let report = verify_certificate(&cert, &VerifyOptions::default());
        assert!(!report.pass);
        assert!(report.coefficient_residual >= 0.01);
    }

    #[test]
    fn degree_cap_violation_fails() {
        let mut cert = telescoping();
        let big = idx(&[1, 1, 1]);
        cert.h1 = VectorPoly::new(big, vec![AnalyticPoly::monomial(big, idx(&[1, 0, 0]), C64::new(0.0, 0.0))])
            .unwrap();
        // a zero entry is harmless; a nonzero one outside the cap is not
        assert!(verify_certificate(&cert, &VerifyOptions::default()).check("h1_degree").unwrap().passed);
        cert.h1 = VectorPoly::new(big, vec![AnalyticPoly::monomial(big, idx(&[1, 0, 0]), C64::new(1e-3, 0.0))])
            .unwrap();
        let report = verify_certificate(&cert, &VerifyOptions::default());
        assert!(!report.check("h1_degree").unwrap().passed);
        assert!(!report.pass);
    }

    #[test]
    fn unimodular_multiple_keeps_outcome() {
        let mut cert = telescoping();
        cert.p = cert.p.scale(C64::from_polar(1.0, 0.7));
        let report = verify_certificate(&cert, &VerifyOptions::default());
        assert!(report.pass);
    }

    #[test]
    fn nan_fails() {
        let mut cert = telescoping();
        let d2 = idx(&[1, 1]);
        cert.e = VectorPoly::new(d2, vec![AnalyticPoly::monomial(d2, d2, C64::new(f64::NAN, 0.0))])
            .unwrap();
        assert!(!verify_certificate(&cert, &VerifyOptions::default()).pass);
    }

    #[test]
    fn quasi_random_points_in_domain() {
        for z in quasi_random_points(100, false) {
            assert!((z[0].norm() - 1.0).abs() < 1e-15 && (z[1].norm() - 1.0).abs() < 1e-15);
            assert!(z[2].norm() < 1.0);
        }
        for z in quasi_random_points(100, true) {
            assert!(z.iter().all(|c| c.norm() < 1.0));
        }
        assert_eq!(quasi_random_points(5, true), quasi_random_points(5, true));
    }
}

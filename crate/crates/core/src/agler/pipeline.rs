use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::agler::{
    build_v, find_h, verify_certificate, AglerCertificate, Metadata, Report, VerifyOptions,
};
use crate::error::{Error, Result};
use crate::poly::{stability_check, AnalyticPoly, Stability, TrigPoly};
use crate::psd::SolverOptions;
use crate::sos::multiplier_search;

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    /// Verification tolerance relative to `|p|_1^2`.
    pub tol: f64,
    /// Largest `r + s` tried.
    pub max_multiplier: i32,
    /// Initial cells per variable of the stability check.
    pub grid: usize,
    pub margin_tol: f64,
    /// Proceed when stability is inconclusive.
    pub override_stability: bool,
    pub solver: SolverOptions,
    /// Grid for the recorded unitarity defect of `V` (0 skips building `V`).
    pub v_grid: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_multiplier: 6,
            grid: 64,
            margin_tol: 1e-12,
            override_stability: false,
            solver: SolverOptions::default(),
            v_grid: 16,
        }
    }
}

/// Builds and verifies a certificate for `p` (declared degree `(n, m, 1)`).
///
/// The returned report comes from [`verify_certificate`]; a certificate is
/// returned even when the report fails so callers can inspect it.
pub fn certify(p: &AnalyticPoly, opts: &CertifyOptions) -> Result<(AglerCertificate, Report)> {
    let d = p.degree();
    if p.nvars() != 3 || d.get(2) != 1 {
        return Err(Error::Invalid(format!(
            "expected three variables with declared degree (n, m, 1), got {:?}",
            d.as_slice()
        )));
    }
    let mut warnings = Vec::new();
    let stability = match stability_check(p, opts.grid.max(8), opts.margin_tol) {
        Stability::Stable { min_modulus } => format!("stable, min modulus on torus {min_modulus:e}"),
        Stability::Unstable { witness, modulus } => {
            return Err(Error::Unstable(format!("|p| = {modulus:e} at {witness:?}")));
        }
        Stability::Inconclusive { reason } => {
            if !opts.override_stability {
                return Err(Error::Inconclusive(reason));
            }
            warnings.push(format!("stability inconclusive, overridden: {reason}"));
            format!("inconclusive: {reason}")
        }
    };

    let (a, b) = p.split_z3()?;
    let t = TrigPoly::mod_squared_diff(&a, &b);
    let (n, m) = (d.get(0), d.get(1));
    let search = multiplier_search(&t, n, m, opts.max_multiplier, &opts.solver)?;
    warnings.extend(search.positivity.warnings.iter().cloned());
    let (r, s) = (search.r, search.s);
    let e = search.sos.e.clone();
    let hs = find_h(p, &e, r, s, &opts.solver)?;

    let mut v_unitarity = f64::NAN;
    if opts.v_grid > 0 && e.dim() > 0 {
        match build_v(&a, &b, &e, r, s, 16) {
            Ok(v) => v_unitarity = v.unitarity_defect(opts.v_grid),
            Err(err) => warnings.push(format!("V not built: {err}")),
        }
    }
    let eps_shifts = if search.sos.shift > 0.0 {
        alloc::vec![search.sos.shift]
    } else {
        Vec::new()
    };
    let metadata = Metadata {
        e_route: String::from(search.sos.route.name()),
        e_residual: search.sos.residual,
        h_residual: hs.evidence.residual,
        h_iterations: hs.evidence.iterations,
        eps_shifts,
        square_counts: [e.dim(), hs.h1.dim(), hs.h2.dim()],
        search_trace: search.trace,
        stability,
        v_unitarity,
        warnings,
        timestamp: None,
    };
    let cert = AglerCertificate {
        p: p.clone(),
        r,
        s,
        e,
        h1: hs.h1,
        h2: hs.h2,
        metadata,
    };
    let report = verify_certificate(
        &cert,
        &VerifyOptions {
            tol: opts.tol,
            ..VerifyOptions::default()
        },
    );
    Ok((cert, report))
}

//! The four subcommands as library functions; `main` only parses flags and
//! moves bytes.

use std::time::{SystemTime, UNIX_EPOCH};

use agler_core::agler::{certify, verify_certificate, AglerCertificate, CertifyOptions, Report, VerifyOptions};
use agler_core::poly::{AnalyticPoly, TrigPoly};
use agler_core::psd::SolverOptions;
use agler_core::sos::{multiplier_search, trig_sos, Attempt};
use agler_core::{Error, MultiIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::format::{read_certificate, read_poly, AttemptFile, Real};
use crate::gen::near_tight_pair;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Flags shared by the subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub grid: usize,
    pub max_multiplier: i32,
    pub seed: u64,
    pub override_stability: bool,
    pub compare_mode: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            grid: 64,
            max_multiplier: 6,
            seed: 0,
            override_stability: false,
            compare_mode: false,
        }
    }
}

impl Settings {
    pub fn certify_options(&self) -> CertifyOptions {
        CertifyOptions {
            tol: self.tol,
            grid: self.grid,
            max_multiplier: self.max_multiplier,
            override_stability: self.override_stability,
            ..CertifyOptions::default()
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tol: self.tol,
            ..VerifyOptions::default()
        }
    }
}

/// A single-line JSON object for standard error.
pub fn diagnostic(kind: &str, message: &str) -> String {
    json!({"level": "error", "kind": kind, "message": message}).to_string()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Unstable(_) => "unstable",
        Error::Inconclusive(_) => "inconclusive",
        Error::Invalid(_) | Error::VariableCount { .. } | Error::OutsideDegreeBox { .. } | Error::DegreeTooHigh { .. } => {
            "invalid_input"
        }
        Error::Infeasible(_) => "infeasible",
        Error::Exhausted { .. } => "exhausted",
        _ => "solver",
    }
}

/// Input errors exit with 2, everything else the pipeline reports with 1.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match error_kind(e) {
        "unstable" | "inconclusive" | "invalid_input" => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

/// Exit code determined by the report alone.
pub fn exit_code_for_report(r: &Report) -> i32 {
    if r.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub struct CommandOutput {
    pub code: i32,
    pub certificate: Option<String>,
    pub report: Option<String>,
    pub diagnostics: Vec<String>,
}

impl CommandOutput {
    fn failure(code: i32, kind: &str, message: &str) -> Self {
        Self {
            code,
            certificate: None,
            report: None,
            diagnostics: vec![diagnostic(kind, message)],
        }
    }
}

fn timestamp() -> String {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("unix:{}", now.as_secs())
}

pub fn certify_poly(p: &AnalyticPoly, settings: &Settings) -> Result<(AglerCertificate, Report), Error> {
    let (mut cert, report) = certify(p, &settings.certify_options())?;
    if !settings.compare_mode {
        cert.metadata.timestamp = Some(timestamp());
    }
    Ok((cert, report))
}

/// `certify`: polynomial file text in, certificate and report text out.
pub fn cmd_certify(input: &str, settings: &Settings) -> CommandOutput {
    let p = match read_poly(input) {
        Ok(p) => p,
        Err(e) => return CommandOutput::failure(EXIT_INPUT, "bad_file", &e.to_string()),
    };
    match certify_poly(&p, settings) {
        Ok((cert, report)) => {
            let mut diagnostics = Vec::new();
            if !report.pass {
                let failed: Vec<&str> = report.checks.iter().filter(|c| c.hard && !c.passed).map(|c| c.name.as_str()).collect();
                diagnostics.push(diagnostic("verification_failed", &format!("failed checks: {}", failed.join(", "))));
            }
            CommandOutput {
                code: exit_code_for_report(&report),
                certificate: Some(crate::format::write_certificate(&cert)),
                report: Some(crate::format::write_report(&report)),
                diagnostics,
            }
        }
        Err(e) => CommandOutput::failure(exit_code_for_error(&e), error_kind(&e), &e.to_string()),
    }
}

/// `verify`: certificate text in, report text out. Never constructs anything.
pub fn cmd_verify(input: &str, settings: &Settings) -> CommandOutput {
    let cert = match read_certificate(input) {
        Ok(c) => c,
        Err(e) => return CommandOutput::failure(EXIT_INPUT, "bad_file", &e.to_string()),
    };
    let report = verify_certificate(&cert, &settings.verify_options());
    let mut diagnostics = Vec::new();
    if !report.pass {
        let failed: Vec<&str> = report.checks.iter().filter(|c| c.hard && !c.passed).map(|c| c.name.as_str()).collect();
        diagnostics.push(diagnostic("verification_failed", &format!("failed checks: {}", failed.join(", "))));
    }
    CommandOutput {
        code: exit_code_for_report(&report),
        certificate: None,
        report: Some(crate::format::write_report(&report)),
        diagnostics,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabTrial {
    pub index: usize,
    pub seed: u64,
    /// Grid maximum of `|b| / |a|` on the torus.
    pub ratio: Real,
    /// `|a|^2 - |b|^2` is a sum of squares at degree `(n, m)`.
    pub base_feasible: bool,
    pub base_residual: Real,
    pub base_iterations: usize,
    pub note: Option<String>,
    /// Smallest `(r, s)` with an SOS at `(n + r, m + s)`, if searched and found.
    pub higher: Option<(i32, i32)>,
    pub search_trace: Vec<AttemptFile>,
    /// Base degree failed but a higher one succeeded.
    pub of_interest: bool,
    /// Independent re-check of the higher-degree certificate.
    pub reverified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub n: i32,
    pub m: i32,
    pub delta: Real,
    pub seed: u64,
    /// Evidence only: solver failure does not prove that no SOS exists.
    pub disclaimer: String,
    pub trials: Vec<LabTrial>,
    pub candidates_of_interest: Vec<usize>,
}

fn trial_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

fn attempt_files(trace: &[Attempt]) -> Vec<AttemptFile> {
    crate::format::MetadataFile::from_metadata(&agler_core::agler::Metadata {
        search_trace: trace.to_vec(),
        ..Default::default()
    })
    .search_trace
}

fn lab_trial(n: i32, m: i32, index: usize, seed: u64, delta: f64, settings: &Settings) -> LabTrial {
    let s = trial_seed(seed, index);
    let mut trial = LabTrial {
        index,
        seed: s,
        ratio: Real(f64::NAN),
        base_feasible: false,
        base_residual: Real(f64::NAN),
        base_iterations: 0,
        note: None,
        higher: None,
        search_trace: Vec::new(),
        of_interest: false,
        reverified: None,
    };
    let (a, b, ratio) = match near_tight_pair(n, m, s, delta) {
        Ok(x) => x,
        Err(e) => {
            trial.note = Some(e.to_string());
            return trial;
        }
    };
    trial.ratio = Real(ratio);
    let t = TrigPoly::mod_squared_diff(&a, &b);
    let scale = t.max_abs_coeff().max(1.0);
    let opts = SolverOptions::default();
    match trig_sos(&t, MultiIndex::new(&[n, m]), &opts) {
        Ok(out) => {
            trial.base_residual = Real(out.residual);
            trial.base_iterations = out.evidence.as_ref().map_or(0, |e| e.iterations);
            trial.base_feasible = out.residual <= agler_core::sos::SOS_TOL * scale;
        }
        Err(Error::Infeasible(ev)) => {
            trial.base_residual = Real(ev.residual);
            trial.base_iterations = ev.iterations;
            trial.note = Some("no SOS found at the base degree; not a proof of infeasibility".into());
        }
        Err(e) => {
            trial.note = Some(e.to_string());
            return trial;
        }
    }
    if trial.base_feasible {
        return trial;
    }
    match multiplier_search(&t, n, m, settings.max_multiplier, &opts) {
        Ok(out) => {
            trial.search_trace = attempt_files(&out.trace);
            if out.r + out.s > 0 {
                trial.higher = Some((out.r, out.s));
                trial.of_interest = true;
                let err = out.sos.e.norm_sq_trig().distance(&t);
                let box_ok = out.sos.e.degree() == MultiIndex::new(&[n + out.r, m + out.s]);
                trial.reverified = Some(box_ok && err <= settings.tol * scale);
            }
        }
        Err(Error::Exhausted { attempts, .. }) => trial.search_trace = attempt_files(&attempts),
        Err(e) => trial.note = Some(e.to_string()),
    }
    trial
}

/// Samples near-tight `(a, b)` pairs and records which degrees admit an SOS
/// of `|a|^2 - |b|^2`. Trials run in parallel; the report is in trial order.
pub fn cmd_lab(n: i32, m: i32, trials: usize, delta: f64, settings: &Settings) -> Result<LabReport, String> {
    if n < 1 || m < 1 {
        return Err(format!("lab needs n, m >= 1, got ({n}, {m})"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(format!("delta must lie in (0, 1), got {delta}"));
    }
    let results: Vec<LabTrial> = (0..trials)
        .into_par_iter()
        .map(|i| lab_trial(n, m, i, settings.seed, delta, settings))
        .collect();
    Ok(LabReport {
        n,
        m,
        delta: Real(delta),
        seed: settings.seed,
        disclaimer: "solver evidence only; a failed search is not a proof that no sum of squares exists".into(),
        candidates_of_interest: results.iter().filter(|t| t.of_interest).map(|t| t.index).collect(),
        trials: results,
    })
}

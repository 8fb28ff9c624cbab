//! JSON file formats: polynomials, certificates, reports.
//!
//! Every writer here has a reader that recovers an identical in-memory
//! value, and re-serializing that value reproduces the same bytes.

use std::fmt;

use agler_core::agler::{AglerCertificate, Check, Metadata, Report};
use agler_core::poly::{AnalyticPoly, VectorPoly};
use agler_core::sos::{Attempt, Route};
use agler_core::{MultiIndex, C64};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError(format!("json: {e}"))
    }
}

impl From<agler_core::Error> for FormatError {
    fn from(e: agler_core::Error) -> Self {
        FormatError(e.to_string())
    }
}

pub type FormatResult<T> = Result<T, FormatError>;

/// f64 that also carries NaN and infinities (as the strings `"NaN"`,
/// `"inf"`, `"-inf"`); finite values are plain JSON numbers.
#[derive(Clone, Copy, Debug)]
pub struct Real(pub f64);

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || self.0 == other.0
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"NaN\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "NaN" => Ok(Real(f64::NAN)),
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coeff {
    pub idx: Vec<i32>,
    pub re: f64,
    pub im: f64,
}

/// `{"nvars", "degree", "coeffs"}` with coefficients in lexicographic index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub nvars: usize,
    pub degree: Vec<i32>,
    pub coeffs: Vec<Coeff>,
}

impl PolyFile {
    pub fn from_poly(p: &AnalyticPoly) -> Self {
        Self {
            nvars: p.nvars(),
            degree: p.degree().as_slice().to_vec(),
            coeffs: p
                .terms()
                .map(|(i, c)| Coeff {
                    idx: i.as_slice().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> FormatResult<AnalyticPoly> {
        if !(1..=3).contains(&self.nvars) || self.degree.len() != self.nvars {
            return Err(FormatError(format!(
                "nvars {} does not match degree of length {}",
                self.nvars,
                self.degree.len()
            )));
        }
        if self.degree.iter().any(|&d| d < 0) {
            return Err(FormatError("negative degree".into()));
        }
        let mut prev: Option<&Vec<i32>> = None;
        for c in &self.coeffs {
            if c.idx.len() != self.nvars {
                return Err(FormatError(format!("index {:?} has wrong length", c.idx)));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(FormatError(format!("non-finite coefficient at {:?}", c.idx)));
            }
            if prev.is_some_and(|p| p >= &c.idx) {
                return Err(FormatError(format!("indices not strictly sorted at {:?}", c.idx)));
            }
            prev = Some(&c.idx);
        }
        Ok(AnalyticPoly::from_terms(
            MultiIndex::new(&self.degree),
            self.coeffs
                .iter()
                .map(|c| (MultiIndex::new(&c.idx), C64::new(c.re, c.im))),
        )?)
    }
}

fn vector_to_file(v: &VectorPoly) -> Vec<PolyFile> {
    v.entries().iter().map(PolyFile::from_poly).collect()
}

fn vector_from_file(files: &[PolyFile], declared: MultiIndex) -> FormatResult<VectorPoly> {
    let entries = files.iter().map(PolyFile::to_poly).collect::<FormatResult<Vec<_>>>()?;
    let degree = entries.first().map_or(declared, |e| e.degree());
    if entries.iter().any(|e| e.degree() != degree) {
        return Err(FormatError("vector entries disagree on degree".into()));
    }
    Ok(VectorPoly::new(degree, entries)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttemptFile {
    pub r: i32,
    pub s: i32,
    pub route: String,
    pub success: bool,
    pub residual: Real,
    pub iterations: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFile {
    pub e_route: String,
    pub e_residual: Real,
    pub h_residual: Real,
    pub h_iterations: usize,
    pub eps_shifts: Vec<Real>,
    pub square_counts: [usize; 3],
    pub search_trace: Vec<AttemptFile>,
    pub stability: String,
    pub v_unitarity: Real,
    pub warnings: Vec<String>,
    pub timestamp: Option<String>,
}

fn route_from_name(name: &str) -> FormatResult<Route> {
    [Route::Lemma, Route::Scalar, Route::Gram]
        .into_iter()
        .find(|r| r.name() == name)
        .ok_or_else(|| FormatError(format!("unknown route {name:?}")))
}

impl MetadataFile {
    pub fn from_metadata(m: &Metadata) -> Self {
        Self {
            e_route: m.e_route.clone(),
            e_residual: Real(m.e_residual),
            h_residual: Real(m.h_residual),
            h_iterations: m.h_iterations,
            eps_shifts: m.eps_shifts.iter().copied().map(Real).collect(),
            square_counts: m.square_counts,
            search_trace: m
                .search_trace
                .iter()
                .map(|a| AttemptFile {
                    r: a.r,
                    s: a.s,
                    route: a.route.name().into(),
                    success: a.success,
                    residual: Real(a.residual),
                    iterations: a.iterations,
                    note: a.note.clone(),
                })
                .collect(),
            stability: m.stability.clone(),
            v_unitarity: Real(m.v_unitarity),
            warnings: m.warnings.clone(),
            timestamp: m.timestamp.clone(),
        }
    }

    pub fn to_metadata(&self) -> FormatResult<Metadata> {
        Ok(Metadata {
            e_route: self.e_route.clone(),
            e_residual: self.e_residual.0,
            h_residual: self.h_residual.0,
            h_iterations: self.h_iterations,
            eps_shifts: self.eps_shifts.iter().map(|x| x.0).collect(),
            square_counts: self.square_counts,
            search_trace: self
                .search_trace
                .iter()
                .map(|a| {
                    Ok(Attempt {
                        r: a.r,
                        s: a.s,
                        route: route_from_name(&a.route)?,
                        success: a.success,
                        residual: a.residual.0,
                        iterations: a.iterations,
                        note: a.note.clone(),
                    })
                })
                .collect::<FormatResult<Vec<_>>>()?,
            stability: self.stability.clone(),
            v_unitarity: self.v_unitarity.0,
            warnings: self.warnings.clone(),
            timestamp: self.timestamp.clone(),
        })
    }
}

/// `{"p", "r", "s", "E", "H1", "H2", "metadata"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub p: PolyFile,
    pub r: i32,
    pub s: i32,
    #[serde(rename = "E")]
    pub e: Vec<PolyFile>,
    #[serde(rename = "H1")]
    pub h1: Vec<PolyFile>,
    #[serde(rename = "H2")]
    pub h2: Vec<PolyFile>,
    pub metadata: MetadataFile,
}

impl CertificateFile {
    pub fn from_certificate(c: &AglerCertificate) -> Self {
        Self {
            p: PolyFile::from_poly(&c.p),
            r: c.r,
            s: c.s,
            e: vector_to_file(&c.e),
            h1: vector_to_file(&c.h1),
            h2: vector_to_file(&c.h2),
            metadata: MetadataFile::from_metadata(&c.metadata),
        }
    }

    pub fn to_certificate(&self) -> FormatResult<AglerCertificate> {
        let p = self.p.to_poly()?;
        if p.nvars() != 3 {
            return Err(FormatError("p must have three variables".into()));
        }
        let mut c = AglerCertificate {
            p,
            r: self.r,
            s: self.s,
            e: VectorPoly::empty(MultiIndex::zero(2)),
            h1: VectorPoly::empty(MultiIndex::zero(3)),
            h2: VectorPoly::empty(MultiIndex::zero(3)),
            metadata: self.metadata.to_metadata()?,
        };
        let [de, d1, d2] = c.boxes();
        if !de.is_nonnegative() {
            return Err(FormatError("negative multiplier".into()));
        }
        c.e = vector_from_file(&self.e, de)?;
        c.h1 = vector_from_file(&self.h1, d1)?;
        c.h2 = vector_from_file(&self.h2, d2)?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckFile {
    pub name: String,
    pub hard: bool,
    pub passed: bool,
    pub value: Real,
    pub limit: Real,
    pub detail: String,
}

/// Verifier output. `verdict` is redundant with `pass` and kept for people.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub verdict: String,
    pub pass: bool,
    pub coefficient_residual: Real,
    pub point_residual: Real,
    pub scale: Real,
    pub square_counts: [usize; 3],
    pub checks: Vec<CheckFile>,
}

impl ReportFile {
    pub fn from_report(r: &Report) -> Self {
        Self {
            verdict: if r.pass { "PASS" } else { "FAIL" }.into(),
            pass: r.pass,
            coefficient_residual: Real(r.coefficient_residual),
            point_residual: Real(r.point_residual),
            scale: Real(r.scale),
            square_counts: r.square_counts,
            checks: r
                .checks
                .iter()
                .map(|c| CheckFile {
                    name: c.name.clone(),
                    hard: c.hard,
                    passed: c.passed,
                    value: Real(c.value),
                    limit: Real(c.limit),
                    detail: c.detail.clone(),
                })
                .collect(),
        }
    }

    pub fn to_report(&self) -> FormatResult<Report> {
        if self.verdict != if self.pass { "PASS" } else { "FAIL" } {
            return Err(FormatError("verdict disagrees with pass".into()));
        }
        Ok(Report {
            pass: self.pass,
            coefficient_residual: self.coefficient_residual.0,
            point_residual: self.point_residual.0,
            scale: self.scale.0,
            square_counts: self.square_counts,
            checks: self
                .checks
                .iter()
                .map(|c| Check {
                    name: c.name.clone(),
                    hard: c.hard,
                    passed: c.passed,
                    value: c.value.0,
                    limit: c.limit.0,
                    detail: c.detail.clone(),
                })
                .collect(),
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values always serialize");
    s.push('\n');
    s
}

pub fn write_poly(p: &AnalyticPoly) -> String {
    to_json(&PolyFile::from_poly(p))
}

pub fn read_poly(text: &str) -> FormatResult<AnalyticPoly> {
    serde_json::from_str::<PolyFile>(text)?.to_poly()
}

pub fn write_certificate(c: &AglerCertificate) -> String {
    to_json(&CertificateFile::from_certificate(c))
}

pub fn read_certificate(text: &str) -> FormatResult<AglerCertificate> {
    serde_json::from_str::<CertificateFile>(text)?.to_certificate()
}

pub fn write_report(r: &Report) -> String {
    to_json(&ReportFile::from_report(r))
}

pub fn read_report(text: &str) -> FormatResult<Report> {
    serde_json::from_str::<ReportFile>(text)?.to_report()
}

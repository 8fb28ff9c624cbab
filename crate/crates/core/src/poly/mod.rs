//! Polynomial types: analytic polynomials with declared degree boxes,
//! Hermitian trigonometric polynomials, vectors of polynomials and
//! expansions in `z` and `conj(z)`.

mod analytic;
pub mod roots;
mod sesqui;
mod stability;
mod trig;
mod vector;

pub use analytic::AnalyticPoly;
pub use sesqui::SesquiPoly;
pub use stability::{stability_check, Stability};
pub use trig::{for_each_torus_point, TorusValue, TrigPoly};
pub use vector::VectorPoly;



/// Coefficients below this magnitude are dropped on canonicalization.
pub const DROP_TOL: f64 = 1e-14;

/// `|a|^2 - |b|^2` on the torus.
pub fn mod_squared_diff(a: &AnalyticPoly, b: &AnalyticPoly) -> TrigPoly {
    TrigPoly::mod_squared_diff(a, b)
}

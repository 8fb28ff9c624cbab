use alloc::boxed::Box;
use alloc::string::String;

use crate::index::MultiIndex;
use crate::psd::Evidence;
use crate::sos::Attempt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("index {index:?} lies outside the degree box {degree:?}")]
    OutsideDegreeBox { index: MultiIndex, degree: MultiIndex },

    #[error("expected {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },

    #[error("degree {found} in z{var} exceeds the allowed {allowed}")]
    DegreeTooHigh { var: usize, found: i32, allowed: i32 },

    #[error("input is negative on the torus (grid minimum {min:e})")]
    NegativeInput { min: f64 },

    #[error("input is not strictly positive on the torus (grid minimum {min:e})")]
    NotPositive { min: f64 },

    #[error("matrix is not positive semidefinite at angle {angle}: eigenvalue {eigenvalue:e}")]
    NotPsd { angle: f64, eigenvalue: f64 },

    #[error("spectral factor did not converge (window {window}, last change {change:e})")]
    NoConvergence { window: usize, change: f64 },

    #[error("no feasible Gram matrix found (residual {:e} after {} iterations)", .0.residual, .0.iterations)]
    Infeasible(Box<Evidence>),

    #[error("multiplier search exhausted after {steps} attempts")]
    Exhausted {
        steps: usize,
        attempts: alloc::vec::Vec<Attempt>,
    },

    #[error("denominator is not verifiably zero-free on the closed bidisk")]
    DenominatorZero,

    #[error("polynomial is not stable on the closed polydisk: {0}")]
    Unstable(String),

    #[error("stability could not be decided: {0}")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

//! Spectral factorization on the circle and the two-squares construction
//! for trigonometric polynomials of degree `(n, 1)`.

mod lemma;
mod matrix;
mod scalar;

pub use lemma::{lemma_two_squares, TwoSquares};
pub use matrix::{
    matrix_fejer_riesz, MatrixFactorization, MatrixPoly, MatrixTrigPoly, BAUER_MAX, BAUER_START,
    BAUER_TOL, BOUNDARY_SHIFT,
};
pub use scalar::{scalar_fejer_riesz, PAIRING_TOL};

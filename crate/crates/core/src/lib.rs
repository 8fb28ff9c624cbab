//! Construction and verification of Agler-type sum-of-squares certificates
//! for rational inner functions on the tridisk.
//!
//! For `p` zero-free on the closed tridisk with multidegree `(n, m, 1)` the
//! crate produces `r, s >= 0` and polynomial vectors `E, H1, H2` with
//!
//! ```text
//! |p|^2 - |z1^r z2^s p~|^2
//!     = (1 - |z1|^2) |H1|^2 + (1 - |z2|^2) |H2|^2 + (1 - |z3|^2) |E|^2
//! ```
//!
//! and checks such identities independently of how they were produced.
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agler;
pub mod error;
pub mod factor;
pub mod index;
pub mod poly;
pub mod psd;
pub mod sos;

pub use error::{Error, Result};
pub use index::MultiIndex;
pub use num_complex::Complex64 as C64;

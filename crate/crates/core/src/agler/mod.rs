//! Agler certificates: construction and independent verification.
//!
//! For `p = a + b z3` of degree `(n, m, 1)` with no zeros on the closed
//! tridisk, a certificate is `(r, s, E, H1, H2)` with
//!
//! ```text
//! |p|^2 - |z1^r z2^s p~|^2 = (1 - |z1|^2)|H1|^2 + (1 - |z2|^2)|H2|^2 + (1 - |z3|^2)|E|^2
//! ```
//!
//! as polynomials in `z` and `conj(z)`, where `p~` is reflected at `(n, m, 1)`.

mod certificate;
mod claim;
mod hsearch;
mod pipeline;
mod verify;

pub use certificate::{AglerCertificate, Metadata};
pub use claim::{build_v, RationalMatrixFn};
pub use hsearch::{find_h, h_boxes, identity_target, HSolution};
pub use pipeline::{certify, CertifyOptions};
pub use verify::{
    identity_residual, quasi_random_points, verify_certificate, Check, Report, VerifyOptions,
};

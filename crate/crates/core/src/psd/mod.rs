//! Dense Hermitian linear algebra and the PSD feasibility solver behind the
//! Gram-matrix searches.

pub mod affine;
mod eigen;
mod gram;
mod ipm;
mod solver;

pub use affine::{AffineConstraintSystem, AffineProjector, Constraint, Term};
pub use eigen::{hermitian_eigen, hermitize, max_abs, project_psd, reconstruct};
pub use gram::{psd_factor, GramCertificate, RANK_TOL};
pub use solver::{solve_feasibility, BlockBasis, Evidence, Solution, SolverOptions};

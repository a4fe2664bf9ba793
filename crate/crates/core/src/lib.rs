//! Eigenanalysis of sparse operators on rotationally periodic domains.
//!
//! An operator on an annulus made of `M` congruent sectors, written in
//! per-sector rotated variables, is block circulant. Its spectrum is the
//! union of the spectra of `M` reduced `N×N` matrices
//!
//! ```text
//! B_m = b_0 + ρ_m b_1 + ρ_m² b_2 + … + ρ_m^{M−1} b_{M−1},   ρ_m = exp(j·2πm/M)
//! ```
//!
//! and every eigenvector of `B_m` lifts back to an eigenvector of the full
//! operator with a known nodal diameter.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`numeric`] | complex CSR/dense matrices, roots of unity, sparse LU, Matrix Market IO |
//! | [`circulant`] | scalar and block circulant operators, reduced blocks, eigenvector lift |
//! | [`sector`] | sector Jacobians, frame rotation, full-annulus assembly |
//! | [`eig`] | shift-invert Krylov–Schur, dense oracle, annulus spectrum drivers |
//! | [`models`] | surrogate sector Jacobians with checkable spectra |
//! | [`spectrum`] | multiset spectrum matching |

pub mod circulant;
pub mod eig;
mod error;
pub mod models;
pub mod numeric;
pub mod sector;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Largest `M·N` for which dense materialization and the dense oracle are allowed.
pub const DEFAULT_DENSE_BUDGET: usize = 4_000;

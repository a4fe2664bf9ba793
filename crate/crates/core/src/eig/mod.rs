//! Eigenvalue solvers: shift-invert Krylov–Schur for interior eigenvalues of
//! sparse matrices, the dense verification oracle, and the annulus drivers
//! built on them.

mod annulus;
mod dense;
mod krylov;
mod schur;

pub use annulus::{
    deduplicate, solve_annulus_spectrum, solve_full_annulus, Method, SolveStats, SolveWarning, SpectrumReport,
    DEDUP_RELATIVE_TOL, DEFAULT_SPARSE_BUDGET,
};
pub use dense::{dense_eigenvalues, dense_eigs};
pub use krylov::{shift_invert_eigs, EigenPair, ShiftInvertConfig, ShiftInvertOutcome, SHIFT_PERTURBATION};

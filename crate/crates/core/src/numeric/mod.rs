//! Complex scalar, sparse and dense matrix primitives.

mod dense;
pub mod lu;
pub mod mtx;
mod sparse;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use dense::DenseMatrix;
pub use lu::SparseLu;
pub use sparse::{sparse_linear_combination, CsrMatrix};

use crate::{Error, Result};

/// Entries of a linear combination with magnitude below this are removed.
pub const CANCELLATION_DROP: f64 = 1e-300;

/// `exp(j·2πm/M)`, the `m`-th of the `M` complex roots of one.
///
/// Evaluated from the angle on every call. Angles in the upper half turn are
/// taken as negative so that `root_of_unity(M − m, M)` is the exact conjugate
/// of `root_of_unity(m, M)`, and quarter turns are returned exactly.
pub fn root_of_unity(m: usize, sectors: usize) -> Result<Complex64> {
    if sectors == 0 {
        return Err(Error::domain("sector count must be at least 1"));
    }
    if m >= sectors {
        return Err(Error::domain(format!(
            "harmonic index {m} out of range for {sectors} sectors"
        )));
    }
    Ok(unit_root(m, sectors))
}

/// `root_of_unity` without range checks; `m` is reduced modulo `sectors`.
pub(crate) fn unit_root(m: usize, sectors: usize) -> Complex64 {
    let m = m % sectors;
    if (4 * m) % sectors == 0 {
        return match 4 * m / sectors {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = if 2 * m > sectors {
        -2.0 * PI * (sectors - m) as f64 / sectors as f64
    } else {
        2.0 * PI * m as f64 / sectors as f64
    };
    Complex64::new(angle.cos(), angle.sin())
}

/// `ρ_m^k`, reduced to a single root so the error does not grow with `k`.
pub(crate) fn unit_root_pow(m: usize, k: usize, sectors: usize) -> Complex64 {
    unit_root((m % sectors) * (k % sectors) % sectors, sectors)
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(x_i)·y_i`
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

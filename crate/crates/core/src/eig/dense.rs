//! Full dense eigendecomposition, used only as a verification oracle.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;

use crate::numeric::{norm2, DenseMatrix};
use crate::{Error, Result};

/// All eigenvalues and unit-norm right eigenvectors of a square matrix.
///
/// Refuses matrices larger than `budget` rows.
pub fn dense_eigs(a: &DenseMatrix, budget: usize) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.ncols(),
        });
    }
    if n > budget {
        return Err(Error::BudgetExceeded {
            required: n,
            budget,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = Array2::from_shape_vec((n, n), a.values().to_vec()).expect("row-major values match shape");
    let (values, vectors) = m.eig().map_err(|_| Error::NoConvergence(n))?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut v: Vec<Complex64> = vectors.column(i).to_vec();
            let s = norm2(&v);
            if s > 0.0 {
                v.iter_mut().for_each(|x| *x /= s);
            }
            (lambda, v)
        })
        .collect())
}

/// Eigenvalues only.
pub fn dense_eigenvalues(a: &DenseMatrix, budget: usize) -> Result<Vec<Complex64>> {
    Ok(dense_eigs(a, budget)?.into_iter().map(|p| p.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_eigenvalue() {
        let e = dense_eigs(&DenseMatrix::identity(4), 10).unwrap();
        assert_eq!(e.len(), 4);
        for (l, _) in e {
            assert!((l - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_generator() {
        let a = DenseMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let mut e: Vec<_> = dense_eigenvalues(&a, 10).unwrap();
        e.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn trace_identity_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let a = DenseMatrix::from_fn(30, 30, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let pairs = dense_eigs(&a, 100).unwrap();
        let sum: Complex64 = pairs.iter().map(|p| p.0).sum();
        assert!((sum - a.trace()).norm() <= 1e-10 * a.trace().norm());
        for (l, v) in &pairs {
            assert!((norm2(v) - 1.0).abs() < 1e-12);
            let r: Vec<_> = a.matvec(v).iter().zip(v).map(|(p, q)| p - l * q).collect();
            assert!(norm2(&r) <= 1e-9 * l.norm().max(1.0));
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            dense_eigs(&DenseMatrix::identity(5), 4),
            Err(Error::BudgetExceeded { required: 5, budget: 4 })
        ));
    }
}

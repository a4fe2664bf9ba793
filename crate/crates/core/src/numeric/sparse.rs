use num_complex::Complex64;

use super::{DenseMatrix, CANCELLATION_DROP};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Compressed-sparse-row complex matrix.
///
/// Column indices are strictly increasing within each row. Entries are kept
/// as given; only linear combinations prune cancelled entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 {
            return Err(Error::DimensionMismatch {
                expected: nrows + 1,
                actual: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: col_indices.len(),
                actual: values.len(),
            });
        }
        if row_offsets[0] != 0 || row_offsets[nrows] != values.len() {
            return Err(Error::domain("row offsets must start at 0 and end at nnz"));
        }
        for r in 0..nrows {
            let (start, end) = (row_offsets[r], row_offsets[r + 1]);
            if start > end {
                return Err(Error::domain(format!("row offsets decrease at row {r}")));
            }
            let cols = &col_indices[start..end];
            if cols.iter().any(|&c| c >= ncols) {
                return Err(Error::domain(format!("column index out of range in row {r}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicate positions are summed.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut entries: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= nrows || c >= ncols {
                return Err(Error::domain(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                row_offsets[r + 1] += 1;
                col_indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::new(nrows, ncols, row_offsets, col_indices, values)
    }

    /// Keeps every entry of `dense` that is not exactly zero.
    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut row_offsets = Vec::with_capacity(dense.nrows() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for r in 0..dense.nrows() {
            for c in 0..dense.ncols() {
                let v = dense[(r, c)];
                if v != ZERO {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self {
            nrows: dense.nrows(),
            ncols: dense.ncols(),
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[Complex64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(p) => vals[p],
            Err(_) => ZERO,
        }
    }

    /// Iterates over stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sparse matrix–vector product.
    pub fn spmv(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                actual: x.len(),
            });
        }
        let mut y = vec![ZERO; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn spmv_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *out = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![ZERO; self.nnz()];
        for (r, c, v) in self.triplets() {
            let p = next[c];
            col_indices[p] = r;
            values[p] = v;
            next[c] += 1;
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// `self − σ·I`, inserting diagonal entries where none are stored.
    pub fn shifted(&self, sigma: Complex64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                actual: self.ncols,
            });
        }
        let shift = CsrMatrix::diagonal(&vec![-sigma; self.nrows]);
        sparse_linear_combination(
            &[self, &shift],
            &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        )
    }

    /// Sparse product `self · rhs`.
    pub fn matmul(&self, rhs: &CsrMatrix) -> Result<Self> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                actual: rhs.nrows,
            });
        }
        let mut acc = vec![ZERO; rhs.ncols];
        let mut marker = vec![usize::MAX; rhs.ncols];
        let mut row_offsets = vec![0usize];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        let mut pattern = Vec::new();
        for r in 0..self.nrows {
            pattern.clear();
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (rcols, rvals) = rhs.row(k);
                for (&c, &b) in rcols.iter().zip(rvals) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = ZERO;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                if acc[c].norm() >= CANCELLATION_DROP {
                    col_indices.push(c);
                    values.push(acc[c]);
                }
            }
            row_offsets.push(values.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: rhs.ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] = v;
        }
        d
    }
}

/// `Σ_k coeffs[k]·blocks[k]` over the merged sparsity pattern.
///
/// Entries whose magnitude falls below [`CANCELLATION_DROP`] after summation
/// are removed, so exact cancellation leaves no stored zeros.
pub fn sparse_linear_combination(
    blocks: &[&CsrMatrix],
    coeffs: &[Complex64],
) -> Result<CsrMatrix> {
    if blocks.is_empty() {
        return Err(Error::domain("linear combination needs at least one block"));
    }
    if blocks.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            actual: coeffs.len(),
        });
    }
    let (nrows, ncols) = (blocks[0].nrows, blocks[0].ncols);
    if nrows != ncols {
        return Err(Error::domain(format!(
            "blocks must be square, got {nrows}x{ncols}"
        )));
    }
    for b in blocks {
        if b.nrows != nrows || b.ncols != ncols {
            return Err(Error::DimensionMismatch {
                expected: nrows,
                actual: if b.nrows != nrows { b.nrows } else { b.ncols },
            });
        }
    }

    let mut acc = vec![ZERO; ncols];
    let mut marker = vec![usize::MAX; ncols];
    let mut pattern = Vec::new();
    let mut row_offsets = Vec::with_capacity(nrows + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    for r in 0..nrows {
        pattern.clear();
        for (block, &alpha) in blocks.iter().zip(coeffs) {
            let (cols, vals) = block.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if marker[c] != r {
                    marker[c] = r;
                    acc[c] = ZERO;
                    pattern.push(c);
                }
                acc[c] += alpha * v;
            }
        }
        pattern.sort_unstable();
        for &c in &pattern {
            if acc[c].norm() >= CANCELLATION_DROP {
                col_indices.push(c);
                values.push(acc[c]);
            }
        }
        row_offsets.push(values.len());
    }
    Ok(CsrMatrix {
        nrows,
        ncols,
        row_offsets,
        col_indices,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::unit_root;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_sparse(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for r in 0..n {
            for col in 0..n {
                if rng.gen::<f64>() < density {
                    t.push((r, col, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, t).unwrap()
    }

    fn dense_matvec(a: &DenseMatrix, x: &[Complex64]) -> Vec<Complex64> {
        (0..a.nrows())
            .map(|r| (0..a.ncols()).map(|k| a[(r, k)] * x[k]).sum())
            .collect()
    }

    #[test]
    fn spmv_identity_and_zero() {
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x);
        let z = CsrMatrix::zeros(2, 2).spmv(&[c(5.0, 0.0), c(7.0, 0.0)]).unwrap();
        assert_eq!(z, vec![ZERO, ZERO]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(matches!(
            CsrMatrix::identity(3).spmv(&[ZERO; 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spmv_matches_dense_4x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_sparse(&mut rng, 4, 0.6);
        let x: Vec<_> = (0..4).map(|_| c(rng.gen(), rng.gen())).collect();
        let sparse = a.spmv(&x).unwrap();
        let dense = dense_matvec(&a.to_dense(), &x);
        for (s, d) in sparse.iter().zip(&dense) {
            assert!((s - d).norm() <= 1e-14);
        }
    }

    #[test]
    fn rejects_malformed_csr() {
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![ZERO]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![ZERO; 2]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![ZERO]).is_err());
        assert!(CsrMatrix::new(1, 1, vec![0, 1], vec![0], vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, [(1, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 1, c(0.5, 1.0))])
            .unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 1), c(1.5, 1.0));
        assert_eq!(a.get(0, 0), ZERO);
    }

    #[test]
    fn combination_scaling_and_cancellation() {
        let i = CsrMatrix::identity(3);
        let three = sparse_linear_combination(&[&i], &[c(3.0, 0.0)]).unwrap();
        assert_eq!(three, CsrMatrix::diagonal(&[c(3.0, 0.0); 3]));
        let zero = sparse_linear_combination(&[&i, &i], &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(zero.nnz(), 0);
        assert!(sparse_linear_combination(&[&i, &CsrMatrix::identity(2)], &[c(1.0, 0.0); 2]).is_err());
        assert!(sparse_linear_combination(&[&i], &[]).is_err());
        assert!(sparse_linear_combination(&[&CsrMatrix::zeros(2, 3)], &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn reduced_block_sum_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let blocks: Vec<_> = (0..3).map(|_| random_sparse(&mut rng, 5, 0.5)).collect();
        let coeffs = [c(1.0, 0.0), unit_root(3, 22), unit_root(3 * 21, 22)];
        let combo = sparse_linear_combination(&[&blocks[0], &blocks[1], &blocks[2]], &coeffs).unwrap();
        let dense: Vec<_> = blocks.iter().map(|b| b.to_dense()).collect();
        for r in 0..5 {
            for col in 0..5 {
                let expected: Complex64 = (0..3).map(|k| coeffs[k] * dense[k][(r, col)]).sum();
                assert!((combo.get(r, col) - expected).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn shifted_inserts_diagonal() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0))]).unwrap();
        let s = a.shifted(c(0.0, 2.0)).unwrap();
        assert_eq!(s.get(0, 0), c(0.0, -2.0));
        assert_eq!(s.get(1, 1), c(0.0, -2.0));
        assert_eq!(s.get(0, 1), c(1.0, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_sparse(&mut rng, 6, 0.4);
        let b = random_sparse(&mut rng, 6, 0.4);
        let p = a.matmul(&b).unwrap().to_dense();
        let q = a.to_dense().matmul(&b.to_dense());
        for r in 0..6 {
            for col in 0..6 {
                assert!((p[(r, col)] - q[(r, col)]).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn transpose_twice_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_sparse(&mut rng, 7, 0.3);
        assert_eq!(a.transpose().transpose(), a);
    }

    proptest! {
        #[test]
        fn spmv_agrees_with_dense(seed in any::<u64>(), n in 1usize..=64, density in 0.1f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_sparse(&mut rng, n, density);
            let x: Vec<_> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let sparse = a.spmv(&x).unwrap();
            let dense = dense_matvec(&a.to_dense(), &x);
            let scale = norm(&dense).max(1e-300);
            let diff: Vec<_> = sparse.iter().zip(&dense).map(|(s, d)| s - d).collect();
            prop_assert!(norm(&diff) <= 1e-13 * scale.max(1.0));
        }

        #[test]
        fn combination_is_linear(seed in any::<u64>(), n in 1usize..=12, alpha_re in -3.0f64..3.0, alpha_im in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let blocks: Vec<_> = (0..3).map(|_| random_sparse(&mut rng, n, 0.5)).collect();
            let refs: Vec<_> = blocks.iter().collect();
            let coeffs: Vec<_> = (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let alpha = c(alpha_re, alpha_im);
            let scaled: Vec<_> = coeffs.iter().map(|&k| alpha * k).collect();
            let lhs = sparse_linear_combination(&refs, &scaled).unwrap();
            let rhs = sparse_linear_combination(&refs, &coeffs).unwrap().scaled(alpha);
            for r in 0..n {
                for col in 0..n {
                    prop_assert!((lhs.get(r, col) - rhs.get(r, col)).norm() <= 1e-14 * alpha.norm().max(1.0) * 4.0);
                }
            }
        }
    }

    fn norm(x: &[Complex64]) -> f64 {
        super::super::norm2(x)
    }
}

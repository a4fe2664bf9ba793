//! Scalar and block circulant operators.
//!
//! A block circulant matrix with blocks `b_0..b_{M−1}` has block `(i, j)`
//! equal to `b_{(j−i) mod M}`. Its eigenvectors split into `M` groups; the
//! group for harmonic `m` has the form `[1, ρ_m, …, ρ_m^{M−1}]ᵀ ⊗ v` where `v`
//! is an eigenvector of the reduced block `B_m = Σ_k ρ_m^k b_k`.

use num_complex::Complex64;

use crate::numeric::{sparse_linear_combination, unit_root, unit_root_pow, CsrMatrix, DenseMatrix};
use crate::{Error, Result};

/// Harmonic index `m` of an `M`-sector operator, `0 ≤ m < M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Harmonic {
    index: usize,
    sectors: usize,
}

impl Harmonic {
    pub fn new(index: usize, sectors: usize) -> Result<Self> {
        if sectors == 0 || index >= sectors {
            return Err(Error::domain(format!(
                "harmonic {index} out of range for {sectors} sectors"
            )));
        }
        Ok(Self { index, sectors })
    }

    /// Every harmonic `0..M`.
    pub fn all(sectors: usize) -> Vec<Harmonic> {
        (0..sectors)
            .map(|index| Harmonic { index, sectors })
            .collect()
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn sectors(self) -> usize {
        self.sectors
    }

    /// `ρ_m = exp(j·2πm/M)`
    pub fn root(self) -> Complex64 {
        unit_root(self.index, self.sectors)
    }

    /// `ρ_m^k`
    pub fn root_pow(self, k: usize) -> Complex64 {
        unit_root_pow(self.index, k, self.sectors)
    }

    /// The harmonic `M − m` whose root is the conjugate of this one.
    pub fn mirror(self) -> Harmonic {
        Harmonic {
            index: (self.sectors - self.index) % self.sectors,
            sectors: self.sectors,
        }
    }

    /// `min(m, M − m)`: number of nodal diameters of modes in this group.
    pub fn nodal_diameter(self) -> usize {
        self.index.min(self.sectors - self.index)
    }
}

/// `[1, ρ_m, ρ_m², …, ρ_m^{M−1}]`
pub fn dft_vector(h: Harmonic) -> Vec<Complex64> {
    (0..h.sectors).map(|k| h.root_pow(k)).collect()
}

/// Circulant matrix given by its first row `b_0..b_{M−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCirculant {
    first_row: Vec<Complex64>,
}

impl ScalarCirculant {
    pub fn new(first_row: Vec<Complex64>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::domain("circulant needs at least one entry"));
        }
        Ok(Self { first_row })
    }

    pub fn sectors(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    /// `λ_m = Σ_k b_k ρ_m^k` with eigenvector `[1, ρ_m, …, ρ_m^{M−1}]`.
    pub fn eigenpair(&self, h: Harmonic) -> Result<(Complex64, Vec<Complex64>)> {
        self.check(h)?;
        let lambda = self
            .first_row
            .iter()
            .enumerate()
            .map(|(k, b)| b * h.root_pow(k))
            .sum();
        Ok((lambda, dft_vector(h)))
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        Harmonic::all(self.sectors())
            .into_iter()
            .map(|h| self.eigenpair(h).expect("harmonic in range").0)
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let m = self.sectors();
        DenseMatrix::from_fn(m, m, |i, j| self.first_row[(j + m - i) % m])
    }

    fn check(&self, h: Harmonic) -> Result<()> {
        if h.sectors != self.sectors() {
            return Err(Error::domain(format!(
                "harmonic for {} sectors used with a {}-sector circulant",
                h.sectors,
                self.sectors()
            )));
        }
        Ok(())
    }
}

/// Block circulant operator with `M` ordered square blocks of dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCirculantOperator {
    blocks: Vec<CsrMatrix>,
}

impl BlockCirculantOperator {
    pub fn new(blocks: Vec<CsrMatrix>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::domain("block circulant operator needs at least one block"))?;
        let n = first.nrows();
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::domain(format!(
                    "block {k} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub fn sectors(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn blocks(&self) -> &[CsrMatrix] {
        &self.blocks
    }

    pub fn is_real(&self) -> bool {
        self.blocks.iter().all(CsrMatrix::is_real)
    }

    /// `B_m = Σ_k ρ_m^k b_k`. Structurally empty blocks are skipped.
    pub fn reduced_block(&self, h: Harmonic) -> Result<CsrMatrix> {
        if h.sectors != self.sectors() {
            return Err(Error::domain(format!(
                "harmonic for {} sectors used with a {}-sector operator",
                h.sectors,
                self.sectors()
            )));
        }
        let (blocks, coeffs): (Vec<&CsrMatrix>, Vec<Complex64>) = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(k, b)| *k == 0 || b.nnz() > 0)
            .map(|(k, b)| (b, h.root_pow(k)))
            .unzip();
        sparse_linear_combination(&blocks, &coeffs)
    }

    /// The full `MN×MN` matrix, block `(i, j)` = `b_{(j−i) mod M}`.
    pub fn materialize(&self, budget: usize) -> Result<CsrMatrix> {
        let (m, n) = (self.sectors(), self.block_dim());
        if m * n > budget {
            return Err(Error::BudgetExceeded {
                required: m * n,
                budget,
            });
        }
        let mut triplets = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let block = &self.blocks[(j + m - i) % m];
                triplets.extend(block.triplets().map(|(r, c, v)| (i * n + r, j * n + c, v)));
            }
        }
        CsrMatrix::from_triplets(m * n, m * n, triplets)
    }
}

/// `w = [1, ρ_m, …, ρ_m^{M−1}]ᵀ ⊗ v`: segment `s` equals `ρ_m^s·v`.
pub fn lift_block_eigenvector(v: &[Complex64], h: Harmonic) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(v.len() * h.sectors);
    for s in 0..h.sectors {
        let phase = h.root_pow(s);
        out.extend(v.iter().map(|x| phase * x));
    }
    out
}

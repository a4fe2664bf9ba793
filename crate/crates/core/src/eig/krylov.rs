//! Shift-invert Krylov–Schur for eigenvalues of a sparse matrix near a
//! complex shift.
//!
//! `(A − σI)` is factored once; the iteration runs on `(A − σI)⁻¹`, whose
//! dominant eigenvalues `μ` correspond to the eigenvalues `λ = σ + 1/μ` of `A`
//! closest to `σ`. Every returned pair is re-checked against `A` itself.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schur::{schur, sort_descending, triangular_eigenvector};
use crate::circulant::Harmonic;
use crate::numeric::{dot, norm2, CsrMatrix, DenseMatrix, SparseLu};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative shift perturbation used when `A − σI` is singular.
pub const SHIFT_PERTURBATION: f64 = 1e-8;

/// A new Krylov vector shorter than this fraction of its pre-orthogonalization
/// length signals an invariant subspace.
const BREAKDOWN_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInvertConfig {
    pub shifts: Vec<Complex64>,
    pub eigs_per_shift: usize,
    /// Krylov subspace size; raised to `2k + 1` when smaller.
    pub subspace_dim: usize,
    /// Bound on `‖Ax − λx‖ / ‖x‖`.
    pub tol: f64,
    pub max_restarts: usize,
    /// The operator is divided by `scale` before solving.
    pub scale: f64,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for ShiftInvertConfig {
    fn default() -> Self {
        Self {
            shifts: vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, 3.0)],
            eigs_per_shift: 2,
            subspace_dim: 20,
            tol: 1e-10,
            max_restarts: 300,
            scale: 1.0,
            seed: 0x5eed,
        }
    }
}

impl ShiftInvertConfig {
    /// Default configuration asking for `k` eigenvalues per shift, with the
    /// subspace sized `max(20, 2k + 1)`.
    pub fn with_eigs_per_shift(k: usize) -> Self {
        Self {
            eigs_per_shift: k,
            subspace_dim: 20.max(2 * k + 1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eigs_per_shift == 0 {
            return Err(Error::domain("at least one eigenvalue per shift is required"));
        }
        if self.subspace_dim < 2 * self.eigs_per_shift + 1 {
            return Err(Error::domain(format!(
                "subspace dimension {} is below 2k + 1 = {}",
                self.subspace_dim,
                2 * self.eigs_per_shift + 1
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::domain("scale must be positive"));
        }
        if self.shifts.is_empty() {
            return Err(Error::domain("at least one shift is required"));
        }
        if self.shifts.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::domain("shifts must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Unit 2-norm.
    pub vector: Vec<Complex64>,
    /// `None` for whole-annulus solves, which carry no harmonic label.
    pub harmonic: Option<Harmonic>,
    /// `‖Ax − λx‖ / ‖x‖` recomputed by a direct product with `A`.
    pub residual: f64,
    pub shift: Complex64,
}

impl EigenPair {
    pub fn nodal_diameter(&self) -> Option<usize> {
        self.harmonic.map(Harmonic::nodal_diameter)
    }
}

/// Result of one shift-invert solve.
#[derive(Debug, Clone)]
pub struct ShiftInvertOutcome {
    /// Converged pairs nearest the shift first.
    pub pairs: Vec<EigenPair>,
    pub requested: usize,
    /// Shift actually factored; differs from the requested one when the
    /// requested shift made `A − σI` singular.
    pub shift_used: Complex64,
    pub perturbed: bool,
    pub converged: bool,
    pub restarts: usize,
    pub factor_nnz: usize,
    /// Largest `|V*V − I|` entry observed at any restart.
    pub orthogonality_loss: f64,
    pub warning: Option<String>,
}

fn factor(a: &CsrMatrix, sigma: Complex64) -> Result<(SparseLu, Complex64, bool)> {
    match SparseLu::factor_shifted(a, sigma) {
        Ok(lu) => Ok((lu, sigma, false)),
        Err(Error::Singular { .. }) => {
            let moved = sigma + SHIFT_PERTURBATION * (1.0 + sigma.norm());
            Ok((SparseLu::factor_shifted(a, moved)?, moved, true))
        }
        Err(e) => Err(e),
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = norm2(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Two passes of classical Gram–Schmidt against `basis`; returns the
/// projection coefficients.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![ZERO; basis.len()];
    for _ in 0..2 {
        let h: Vec<Complex64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, hi) in basis.iter().zip(&h) {
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= hi * vk;
            }
        }
        for (c, hi) in coeffs.iter_mut().zip(h) {
            *c += hi;
        }
    }
    coeffs
}

/// A unit vector orthogonal to `basis`, or `None` when the basis spans the
/// whole space.
fn fresh_direction(rng: &mut ChaCha8Rng, basis: &[Vec<Complex64>], n: usize) -> Option<Vec<Complex64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut w = random_unit(rng, n);
        orthogonalize(basis, &mut w);
        let s = norm2(&w);
        if s > 1e-8 {
            w.iter_mut().for_each(|x| *x /= s);
            return Some(w);
        }
    }
    None
}

fn orthogonality_loss(basis: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, vi) in basis.iter().enumerate() {
        for (j, vj) in basis.iter().enumerate().skip(i) {
            let g = dot(vi, vj);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

fn residual(a: &CsrMatrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let ax = a.spmv(x).expect("square operator");
    let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - lambda * q).norm_sqr()).sum::<f64>().sqrt();
    r / norm2(x)
}

/// Up to `k` eigenpairs of `a` nearest `sigma`, ordered by `|λ − σ|`.
///
/// Only `tol`, `subspace_dim`, `max_restarts` and `seed` are read from `cfg`.
/// A singular `a − σI` is retried once with `σ` moved by
/// `SHIFT_PERTURBATION·(1 + |σ|)`. When the restart budget runs out the
/// converged subset is returned with a warning.
pub fn shift_invert_eigs(a: &CsrMatrix, sigma: Complex64, k: usize, cfg: &ShiftInvertConfig) -> Result<ShiftInvertOutcome> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = a.nrows();
    let (lu, shift_used, perturbed) = factor(a, sigma)?;
    let mut outcome = ShiftInvertOutcome {
        pairs: Vec::new(),
        requested: k,
        shift_used,
        perturbed,
        converged: false,
        restarts: 0,
        factor_nnz: lu.factor_nnz(),
        orthogonality_loss: 0.0,
        warning: None,
    };
    if n == 0 {
        outcome.converged = true;
        return Ok(outcome);
    }
    let k = k.min(n);
    let p = cfg.subspace_dim.max(2 * k + 1).min(n);
    let keep = (k + (p - k) / 2).min(p.saturating_sub(1)).max(k.min(p));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut basis: Vec<Vec<Complex64>> = vec![random_unit(&mut rng, n)];
    // (p+1)×p projected matrix; leading `filled` columns valid
    let mut h = DenseMatrix::zeros(p + 1, p);
    let mut filled = 0usize;
    let mut best: Vec<EigenPair> = Vec::new();

    for restart in 0..=cfg.max_restarts {
        outcome.restarts = restart;
        for j in filled..p {
            let mut w = lu.solve(&basis[j])?;
            let before = norm2(&w);
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.into_iter().enumerate() {
                h[(i, j)] += c;
            }
            let beta = norm2(&w);
            if beta > BREAKDOWN_RATIO * before {
                h[(j + 1, j)] = Complex64::new(beta, 0.0);
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(w);
            } else {
                h[(j + 1, j)] = ZERO;
                let next = fresh_direction(&mut rng, &basis, n).unwrap_or_else(|| vec![ZERO; n]);
                basis.push(next);
            }
        }
        let spans_space = basis[p].iter().all(|x| *x == ZERO);
        let live = if spans_space { &basis[..p] } else { &basis[..] };
        outcome.orthogonality_loss = outcome.orthogonality_loss.max(orthogonality_loss(live));

        let hp = DenseMatrix::from_fn(p, p, |i, j| h[(i, j)]);
        let mut s = schur(&hp)?;
        sort_descending(&mut s);
        // coupling row of the last basis vector in Schur coordinates
        let b: Vec<Complex64> = (0..p).map(|j| (0..p).map(|i| h[(p, i)] * s.q[(i, j)]).sum()).collect();

        let mut candidates = Vec::with_capacity(k);
        for i in 0..k {
            let mu = s.t[(i, i)];
            if mu == ZERO {
                continue;
            }
            let y = s.q.matvec(&triangular_eigenvector(&s.t, i));
            let mut x = vec![ZERO; n];
            for (v, &yi) in basis.iter().zip(&y) {
                for (xk, vk) in x.iter_mut().zip(v) {
                    *xk += yi * vk;
                }
            }
            let xn = norm2(&x);
            x.iter_mut().for_each(|z| *z /= xn);
            let lambda = shift_used + mu.inv();
            candidates.push(EigenPair {
                lambda,
                residual: residual(a, lambda, &x),
                vector: x,
                harmonic: None,
                shift: sigma,
            });
        }
        let accepted = candidates.iter().filter(|c| c.residual <= cfg.tol).count();
        if accepted >= best.iter().filter(|c| c.residual <= cfg.tol).count() {
            best = candidates;
        }
        if accepted == k {
            outcome.converged = true;
            break;
        }
        let exhausted = spans_space && b.iter().all(|z| *z == ZERO);
        if exhausted || restart == cfg.max_restarts {
            break;
        }

        // keep the leading Schur vectors and restart from the last basis vector
        let mut kept: Vec<Vec<Complex64>> = (0..keep)
            .map(|col| {
                let mut v = vec![ZERO; n];
                for (bv, i) in basis.iter().take(p).zip(0..p) {
                    let qi = s.q[(i, col)];
                    for (vk, bk) in v.iter_mut().zip(bv) {
                        *vk += qi * bk;
                    }
                }
                v
            })
            .collect();
        let mut last = basis.pop().expect("p + 1 vectors");
        if spans_space {
            last = fresh_direction(&mut rng, &kept, n).unwrap_or_else(|| vec![ZERO; n]);
        }
        kept.push(last);
        basis = kept;
        h = DenseMatrix::zeros(p + 1, p);
        for i in 0..keep {
            for j in i..keep {
                h[(i, j)] = s.t[(i, j)];
            }
            h[(keep, i)] = if spans_space { ZERO } else { b[i] };
        }
        filled = keep;
    }

    let mut pairs: Vec<EigenPair> = best.into_iter().filter(|c| c.residual <= cfg.tol).collect();
    pairs.sort_by(|x, y| (x.lambda - sigma).norm().total_cmp(&(y.lambda - sigma).norm()));
    if !outcome.converged {
        outcome.warning = Some(format!(
            "{} of {} eigenvalues near {} converged after {} restarts",
            pairs.len(),
            k,
            fmt_complex(sigma),
            outcome.restarts
        ));
    }
    outcome.pairs = pairs;
    Ok(outcome)
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

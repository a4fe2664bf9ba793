//! Complex Schur form of the small projected matrices of the Krylov–Schur
//! iteration: `A = Q·T·Q*` with `T` upper triangular and `Q` unitary.

use num_complex::Complex64;

use crate::numeric::DenseMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Iterations allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// An ad hoc shift replaces the Wilkinson shift on every this-many iterations
/// without deflation.
const EXCEPTIONAL_PERIOD: usize = 10;

#[derive(Debug, Clone)]
pub(crate) struct Schur {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
}

/// Plane rotation `G = [[c, s], [−s̄, c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// `G·[x, y]ᵀ = [r, 0]ᵀ`
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        if y == ZERO {
            return Self { c: 1.0, s: ZERO };
        }
        let ax = x.norm();
        let norm = ax.hypot(y.norm());
        if ax == 0.0 {
            return Self {
                c: 0.0,
                s: y.conj() / y.norm(),
            };
        }
        Self {
            c: ax / norm,
            s: (x / ax) * y.conj() / norm,
        }
    }

    /// Rows `k`, `k+1` of `m` ← `G·m`, for columns in `cols`.
    fn rows(self, m: &mut DenseMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let (a, b) = (m[(k, j)], m[(k + 1, j)]);
            m[(k, j)] = a * self.c + self.s * b;
            m[(k + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `k`, `k+1` of `m` ← `m·G*`, for rows in `rows`.
    fn cols(self, m: &mut DenseMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let (a, b) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = a * self.c + b * self.s.conj();
            m[(i, k + 1)] = -a * self.s + b * self.c;
        }
    }
}

pub(crate) fn schur(a: &DenseMatrix) -> Result<Schur> {
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = DenseMatrix::identity(n);
    hessenberg(&mut t, &mut q);
    qr_iterate(&mut t, &mut q)?;
    Ok(Schur { q, t })
}

fn hessenberg(h: &mut DenseMatrix, q: &mut DenseMatrix) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0] == ZERO { Complex64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);
        // H ← (I − 2vv*)·H
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= 2.0 * vi * s;
            }
        }
        // H ← H·(I − 2vv*), Q ← Q·(I − 2vv*)
        for m in [&mut *h, &mut *q] {
            for r in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(i, vi)| m[(r, k + 1 + i)] * vi).sum();
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= 2.0 * s * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_iterate(h: &mut DenseMatrix, q: &mut DenseMatrix) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut total = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let sub = h[(lo, lo - 1)].norm();
            if sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        since_deflation += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence(n));
        }
        let mu = if since_deflation % EXCEPTIONAL_PERIOD == 0 {
            h[(hi, hi)] + Complex64::new(0.75, 0.5) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..hi {
            let g = if k == lo {
                Givens::zeroing(h[(lo, lo)] - mu, h[(lo + 1, lo)])
            } else {
                Givens::zeroing(h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let first = if k == lo { lo } else { k - 1 };
            g.rows(h, k, first..n);
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            g.cols(h, k, 0..(k + 3).min(hi + 1));
            g.cols(q, k, 0..n);
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Exchanges diagonal entries `k` and `k+1` of the triangular factor.
fn swap(s: &mut Schur, k: usize) {
    let n = s.t.nrows();
    let (t11, t22) = (s.t[(k, k)], s.t[(k + 1, k + 1)]);
    let g = Givens::zeroing(s.t[(k, k + 1)], t22 - t11);
    g.rows(&mut s.t, k, k..n);
    g.cols(&mut s.t, k, 0..k + 2);
    g.cols(&mut s.q, k, 0..n);
    s.t[(k + 1, k)] = ZERO;
    s.t[(k, k)] = t22;
    s.t[(k + 1, k + 1)] = t11;
}

/// Reorders the Schur form so diagonal magnitudes are non-increasing.
pub(crate) fn sort_descending(s: &mut Schur) {
    let n = s.t.nrows();
    for end in (1..n).rev() {
        let mut moved = false;
        for k in 0..end {
            if s.t[(k + 1, k + 1)].norm() > s.t[(k, k)].norm() {
                swap(s, k);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

/// Unit eigenvector of the triangular `t` for the eigenvalue `t[i][i]`,
/// zero below position `i`.
pub(crate) fn triangular_eigenvector(t: &DenseMatrix, i: usize) -> Vec<Complex64> {
    let n = t.nrows();
    let lambda = t[(i, i)];
    let tnorm = t.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
    let mut y = vec![ZERO; n];
    y[i] = Complex64::new(1.0, 0.0);
    for j in (0..i).rev() {
        let s: Complex64 = (j + 1..=i).map(|l| t[(j, l)] * y[l]).sum();
        let mut d = t[(j, j)] - lambda;
        if d.norm() < floor {
            d = Complex64::new(floor, 0.0);
        }
        y[j] = -s / d;
    }
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    y.iter_mut().for_each(|z| *z /= norm);
    y
}

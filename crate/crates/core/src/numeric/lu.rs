//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Columns are processed in reverse Cuthill–McKee order of the symmetrized
//! pattern, which keeps the banded sector operators banded. Each column is
//! obtained by a sparse triangular solve against the partial `L`
//! (Gilbert–Peierls), followed by a row pivot search.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::CsrMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const UNASSIGNED: usize = usize::MAX;

/// A diagonal candidate is kept as pivot when it is at least this fraction of
/// the largest candidate in its column.
const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Pivots below this multiple of `max|A|` are reported as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

/// Factorization `P·A·Q = L·U` of a square complex sparse matrix.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    l_colptr: Vec<usize>,
    l_rowind: Vec<usize>,
    l_vals: Vec<Complex64>,
    u_colptr: Vec<usize>,
    u_rowind: Vec<usize>,
    u_vals: Vec<Complex64>,
    /// original row -> pivot position
    pinv: Vec<usize>,
    /// pivot position -> original column
    q: Vec<usize>,
}

impl SparseLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        Self::factor_reporting(a, ZERO)
    }

    /// Factors `a − σ·I`. A singular result names `σ` as a candidate eigenvalue.
    pub fn factor_shifted(a: &CsrMatrix, sigma: Complex64) -> Result<Self> {
        Self::factor_reporting(&a.shifted(sigma)?, sigma)
    }

    fn factor_reporting(a: &CsrMatrix, shift: Complex64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: a.ncols(),
            });
        }
        let n = a.nrows();
        let q = reverse_cuthill_mckee(a);
        // CSR of the transpose is CSC of `a`.
        let csc = a.transpose();
        let threshold = SINGULAR_PIVOT_RATIO * a.max_abs();

        let mut l_colptr = Vec::with_capacity(n + 1);
        let mut l_rowind: Vec<usize> = Vec::new();
        let mut l_vals = Vec::new();
        let mut u_colptr = Vec::with_capacity(n + 1);
        let mut u_rowind = Vec::new();
        let mut u_vals = Vec::new();
        l_colptr.push(0);
        u_colptr.push(0);

        let mut pinv = vec![UNASSIGNED; n];
        let mut x = vec![ZERO; n];
        let mut xi = vec![0usize; n];
        let mut marked = vec![false; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            let col = q[k];
            let (rows, vals) = csc.row(col);

            // Symbolic: nodes reachable from the column pattern through L.
            let mut top = n;
            for &start in rows {
                if marked[start] {
                    continue;
                }
                marked[start] = true;
                stack.push((start, child_start(&pinv, &l_colptr, start)));
                while let Some(&(j, p)) = stack.last() {
                    let end = child_end(&pinv, &l_colptr, j);
                    let mut p = p;
                    let mut descended = false;
                    while p < end {
                        let i = l_rowind[p];
                        p += 1;
                        if !marked[i] {
                            marked[i] = true;
                            stack.last_mut().expect("stack not empty").1 = p;
                            stack.push((i, child_start(&pinv, &l_colptr, i)));
                            descended = true;
                            break;
                        }
                    }
                    if !descended {
                        stack.pop();
                        top -= 1;
                        xi[top] = j;
                    }
                }
            }

            // Numeric: x = L \ a[:, col] on the reach set.
            for &i in &xi[top..n] {
                x[i] = ZERO;
            }
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] = v;
            }
            for &j in &xi[top..n] {
                let jcol = pinv[j];
                if jcol == UNASSIGNED {
                    continue;
                }
                let xj = x[j];
                for p in l_colptr[jcol] + 1..l_colptr[jcol + 1] {
                    x[l_rowind[p]] -= l_vals[p] * xj;
                }
            }

            // Pivot search over rows not yet pivotal.
            let mut pivot_row = UNASSIGNED;
            let mut largest = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == UNASSIGNED {
                    let m = x[i].norm();
                    if m > largest {
                        largest = m;
                        pivot_row = i;
                    }
                } else {
                    u_rowind.push(pinv[i]);
                    u_vals.push(x[i]);
                }
            }
            if pivot_row != UNASSIGNED
                && pinv[col] == UNASSIGNED
                && marked[col]
                && x[col].norm() >= DIAGONAL_PREFERENCE * largest
            {
                pivot_row = col;
            }
            if pivot_row == UNASSIGNED || largest <= threshold || largest == 0.0 {
                return Err(Error::Singular {
                    pivot: k,
                    magnitude: largest.max(0.0),
                    shift,
                });
            }
            let pivot = x[pivot_row];
            u_rowind.push(k);
            u_vals.push(pivot);
            u_colptr.push(u_vals.len());

            pinv[pivot_row] = k;
            l_rowind.push(pivot_row);
            l_vals.push(Complex64::new(1.0, 0.0));
            for &i in &xi[top..n] {
                if pinv[i] == UNASSIGNED {
                    l_rowind.push(i);
                    l_vals.push(x[i] / pivot);
                }
                x[i] = ZERO;
                marked[i] = false;
            }
            l_colptr.push(l_vals.len());
        }

        for r in l_rowind.iter_mut() {
            *r = pinv[*r];
        }

        Ok(Self {
            n,
            l_colptr,
            l_rowind,
            l_vals,
            u_colptr,
            u_rowind,
            u_vals,
            pinv,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U` together.
    pub fn factor_nnz(&self) -> usize {
        self.l_vals.len() + self.u_vals.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: b.len(),
            });
        }
        let mut y = vec![ZERO; self.n];
        for (i, &v) in b.iter().enumerate() {
            y[self.pinv[i]] = v;
        }
        for j in 0..self.n {
            let yj = y[j];
            if yj == ZERO {
                continue;
            }
            for p in self.l_colptr[j] + 1..self.l_colptr[j + 1] {
                y[self.l_rowind[p]] -= self.l_vals[p] * yj;
            }
        }
        for j in (0..self.n).rev() {
            let diag_pos = self.u_colptr[j + 1] - 1;
            y[j] /= self.u_vals[diag_pos];
            let yj = y[j];
            if yj == ZERO {
                continue;
            }
            for p in self.u_colptr[j]..diag_pos {
                y[self.u_rowind[p]] -= self.u_vals[p] * yj;
            }
        }
        let mut x = vec![ZERO; self.n];
        for (k, &col) in self.q.iter().enumerate() {
            x[col] = y[k];
        }
        Ok(x)
    }
}

fn child_start(pinv: &[usize], l_colptr: &[usize], node: usize) -> usize {
    match pinv[node] {
        UNASSIGNED => 0,
        c => l_colptr[c] + 1,
    }
}

fn child_end(pinv: &[usize], l_colptr: &[usize], node: usize) -> usize {
    match pinv[node] {
        UNASSIGNED => 0,
        c => l_colptr[c + 1],
    }
}

/// Reverse Cuthill–McKee ordering of the pattern of `A + Aᵀ`.
fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in a.triplets() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut current = seed;
    let mut eccentricity = 0;
    for _ in 0..8 {
        let levels = bfs_levels(current, adj);
        let depth = levels.iter().filter_map(|&l| l).max().unwrap_or(0);
        if depth <= eccentricity && current != seed {
            break;
        }
        eccentricity = depth;
        let candidate = levels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(depth))
            .map(|(v, _)| v)
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(current);
        if candidate == current {
            break;
        }
        current = candidate;
    }
    current
}

fn bfs_levels(start: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut levels = vec![None; adj.len()];
    levels[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let next = levels[v].map(|l| l + 1);
        for &w in &adj[v] {
            if levels[w].is_none() {
                levels[w] = next;
                queue.push_back(w);
            }
        }
    }
    levels
}

//! Surrogate sector Jacobians whose spectra can be checked independently.
//!
//! * [`make_ring_advection_diffusion`]: scalar advection–diffusion on a
//!   periodic ring; the full operator is a scalar circulant.
//! * [`make_rotating_vector_model`]: a planar vector field with anisotropic
//!   dynamics written in per-point polar frames; the frame rotation is
//!   essential to its reduction.
//! * [`make_random_sector_jacobian`]: seeded random blocks with the
//!   nearest-neighbour pattern.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circulant::ScalarCirculant;
use crate::numeric::CsrMatrix;
use crate::sector::{DofLayout, SectorJacobian};
use crate::{Error, Result};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvectionScheme {
    /// First-order upwind for the advection speed sign.
    Upwind,
    /// Second-order central; antisymmetric stencil.
    Central,
}

/// Ring model `∂u/∂t = rotation_rate·(ν·u_xx − peclet·u_x)` on
/// `x ∈ [0, 2π)` with `M·n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RingParams {
    pub sectors: usize,
    pub points: usize,
    pub peclet: f64,
    pub rotation_rate: f64,
    pub diffusivity: f64,
    pub scheme: AdvectionScheme,
}

impl RingParams {
    pub fn new(sectors: usize, points: usize, peclet: f64, rotation_rate: f64) -> Self {
        Self {
            sectors,
            points,
            peclet,
            rotation_rate,
            diffusivity: 1.0,
            scheme: AdvectionScheme::Upwind,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / (self.sectors * self.points) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.sectors < 3 {
            return Err(Error::domain("ring model needs at least 3 sectors"));
        }
        if self.points == 0 {
            return Err(Error::domain("ring model needs at least one point per sector"));
        }
        if !(self.peclet >= 0.0 && self.peclet.is_finite()) {
            return Err(Error::domain("peclet must be finite and non-negative"));
        }
        if !(self.diffusivity >= 0.0 && self.diffusivity.is_finite()) {
            return Err(Error::domain("diffusivity must be finite and non-negative"));
        }
        if !self.rotation_rate.is_finite() {
            return Err(Error::domain("rotation rate must be finite"));
        }
        Ok(())
    }

    /// Stencil weights `(left, centre, right)` acting on `u_{i−1}, u_i, u_{i+1}`.
    pub fn stencil(&self) -> (f64, f64, f64) {
        let h = self.spacing();
        let d = self.diffusivity / (h * h);
        let c = self.peclet;
        let (l, m, r) = match self.scheme {
            AdvectionScheme::Upwind => (d + c / h, -2.0 * d - c / h, d),
            AdvectionScheme::Central => (d + c / (2.0 * h), -2.0 * d, d - c / (2.0 * h)),
        };
        let s = self.rotation_rate;
        (s * l, s * m, s * r)
    }

    /// First row of the `M·n`-point circulant of the whole ring.
    pub fn first_row(&self) -> Vec<Complex64> {
        let total = self.sectors * self.points;
        let (l, m, r) = self.stencil();
        let mut row = vec![Complex64::new(0.0, 0.0); total];
        row[0] += real(m);
        row[1 % total] += real(r);
        row[total - 1] += real(l);
        row
    }

    /// Exact spectrum of the whole ring.
    pub fn analytic_spectrum(&self) -> Vec<Complex64> {
        ScalarCirculant::new(self.first_row())
            .expect("non-empty row")
            .eigenvalues()
    }
}

pub fn make_ring(params: &RingParams) -> Result<SectorJacobian> {
    params.validate()?;
    let n = params.points;
    let (l, m, r) = params.stencil();
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, real(m)));
        if i > 0 {
            t.push((i, i - 1, real(l)));
        }
        if i + 1 < n {
            t.push((i, i + 1, real(r)));
        }
    }
    let nz = |v: f64| if v == 0.0 { Vec::new() } else { vec![(0, 0, real(v))] };
    let d_self = CsrMatrix::from_triplets(n, n, t.into_iter().filter(|e| e.2 != real(0.0)))?;
    // last point of sector 0 sees the first point of sector 1, and vice versa
    let d_next = CsrMatrix::from_triplets(n, n, nz(r).into_iter().map(|(_, _, v)| (n - 1, 0, v)))?;
    let d_prev = CsrMatrix::from_triplets(n, n, nz(l).into_iter().map(|(_, _, v)| (0, n - 1, v)))?;
    SectorJacobian::new(params.sectors, d_self, d_next, d_prev, DofLayout::scalar(n)?)
}

/// Unit diffusivity, upwind advection at speed `peclet`, all scaled by
/// `rotation_rate`.
pub fn make_ring_advection_diffusion(sectors: usize, points: usize, peclet: f64, rotation_rate: f64) -> Result<SectorJacobian> {
    make_ring(&RingParams::new(sectors, points, peclet, rotation_rate))
}

type Mat2 = [[f64; 2]; 2];

/// Local dynamics in the (radial, tangential) frame of each point.
const LOCAL_DYNAMICS: Mat2 = [[-1.0, 0.8], [-2.5, -0.4]];
/// Coupling to the following point, local frames on both ends.
const COUPLING_NEXT: Mat2 = [[0.6, -1.1], [0.3, 0.9]];
/// Coupling to the preceding point.
const COUPLING_PREV: Mat2 = [[0.5, 0.7], [-1.3, 0.2]];

fn rot(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    [[c, -s], [s, c]]
}

fn mul(a: Mat2, b: Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn scale(a: Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

fn push_block(t: &mut Vec<(usize, usize, Complex64)>, row_point: usize, col_point: usize, b: Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            if b[i][j] != 0.0 {
                t.push((2 * row_point + i, 2 * col_point + j, real(b[i][j])));
            }
        }
    }
}

/// `R(φ_a)·K·R(φ_b)ᵀ`: maps a vector at angle `φ_b` into the mesh frame at
/// `φ_a` through the local frames.
fn framed(k: Mat2, phi_a: f64, phi_b: f64) -> Mat2 {
    mul(mul(rot(phi_a), k), transpose(rot(phi_b)))
}

/// A planar vector field sampled at `n` points per sector, velocity
/// components `(u_x, u_y)` in the mesh frame at each point.
///
/// Point `i` of sector 0 sits at angle `φ_i = (i + ½)·θ/n`. Each point relaxes
/// under a fixed anisotropic matrix in its own polar frame and is coupled to
/// its ring neighbours through fixed matrices, also in polar frames. The
/// returned blocks are in rotated unknowns, so sector 1's first point is seen
/// at angle `φ_0` rather than `φ_0 + θ`.
pub fn make_rotating_vector_model(sectors: usize, points: usize, coupling: f64) -> Result<SectorJacobian> {
    if sectors < 3 {
        return Err(Error::domain("rotating vector model needs at least 3 sectors"));
    }
    if points == 0 {
        return Err(Error::domain("rotating vector model needs at least one point per sector"));
    }
    if !coupling.is_finite() {
        return Err(Error::domain("coupling must be finite"));
    }
    let n = points;
    let theta = 2.0 * PI / sectors as f64;
    let phi = |i: f64| (i + 0.5) * theta / n as f64;
    let next = scale(COUPLING_NEXT, coupling);
    let prev = scale(COUPLING_PREV, coupling);

    let mut s = Vec::new();
    for i in 0..n {
        push_block(&mut s, i, i, framed(LOCAL_DYNAMICS, phi(i as f64), phi(i as f64)));
        if i + 1 < n {
            push_block(&mut s, i, i + 1, framed(next, phi(i as f64), phi(i as f64 + 1.0)));
        }
        if i > 0 {
            push_block(&mut s, i, i - 1, framed(prev, phi(i as f64), phi(i as f64 - 1.0)));
        }
    }
    let mut dn = Vec::new();
    push_block(&mut dn, n - 1, 0, framed(next, phi(n as f64 - 1.0), phi(0.0)));
    let mut dp = Vec::new();
    push_block(&mut dp, 0, n - 1, framed(prev, phi(0.0), phi(n as f64 - 1.0)));

    let dim = 2 * n;
    SectorJacobian::new(
        sectors,
        CsrMatrix::from_triplets(dim, dim, s)?,
        CsrMatrix::from_triplets(dim, dim, dn)?,
        CsrMatrix::from_triplets(dim, dim, dp)?,
        DofLayout::new(n, 2, vec![(0, 1)])?,
    )
}

/// Seeded random sector blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub sectors: usize,
    pub dim: usize,
    pub density: f64,
    pub seed: u64,
    /// Declare a rotating pair: with even `dim`, `dim/2` points of two
    /// rotating variables; otherwise one point whose first two variables
    /// rotate.
    pub rotating: bool,
}

fn random_layout(dim: usize, rotating: bool) -> Result<DofLayout> {
    if !rotating || dim < 2 {
        DofLayout::new(1, dim, Vec::new())
    } else if dim % 2 == 0 {
        DofLayout::new(dim / 2, 2, vec![(0, 1)])
    } else {
        DofLayout::new(1, dim, vec![(0, 1)])
    }
}

pub fn make_random(params: &RandomParams) -> Result<SectorJacobian> {
    let RandomParams {
        sectors,
        dim: n,
        density,
        seed,
        rotating,
    } = *params;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::domain("density must lie in (0, 1]"));
    }
    if n == 0 || sectors == 0 {
        return Err(Error::domain("dimension and sector count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec<(usize, f64)>> {
        (0..n)
            .map(|_| {
                (0..n)
                    .filter_map(|c| {
                        let keep = rng.gen::<f64>() < density;
                        let v = rng.gen_range(-1.0..=1.0);
                        keep.then_some((c, v))
                    })
                    .collect()
            })
            .collect()
    };
    let own = draw(&mut rng);
    let next = draw(&mut rng);
    let prev = draw(&mut rng);
    let next = if sectors >= 2 { next } else { vec![Vec::new(); n] };
    let prev = if sectors >= 3 { prev } else { vec![Vec::new(); n] };

    let mut t_self = Vec::new();
    for (r, row) in own.iter().enumerate() {
        let degree = row.len() + next[r].len() + prev[r].len();
        let mut diag = -2.0 * degree as f64;
        for &(c, v) in row {
            if c == r {
                diag += v;
            } else {
                t_self.push((r, c, real(v)));
            }
        }
        if diag != 0.0 {
            t_self.push((r, r, real(diag)));
        }
    }
    let to_triplets = |rows: &[Vec<(usize, f64)>]| -> Vec<(usize, usize, Complex64)> {
        rows.iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, real(v))))
            .collect()
    };
    SectorJacobian::new(
        sectors,
        CsrMatrix::from_triplets(n, n, t_self)?,
        CsrMatrix::from_triplets(n, n, to_triplets(&next))?,
        CsrMatrix::from_triplets(n, n, to_triplets(&prev))?,
        random_layout(n, rotating)?,
    )
}

/// Random blocks with no rotating variables.
pub fn make_random_sector_jacobian(sectors: usize, dim: usize, density: f64, seed: u64) -> Result<SectorJacobian> {
    make_random(&RandomParams {
        sectors,
        dim,
        density,
        seed,
        rotating: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::Harmonic;
    use crate::eig::{dense_eigenvalues, dense_eigs};
    use crate::sector::rotation_matrix;
    use crate::spectrum::{multiset_distance, spectral_radius};
    use proptest::prelude::*;

    fn dense_spectrum(a: &CsrMatrix) -> Vec<Complex64> {
        dense_eigenvalues(&a.to_dense(), usize::MAX).unwrap()
    }

    fn reduced_union(j: &SectorJacobian) -> Vec<Complex64> {
        j.harmonics()
            .into_iter()
            .flat_map(|h| dense_spectrum(&j.reduced_block(h).unwrap()))
            .collect()
    }

    /// Direct evaluation of the ring eigenvalues from the stencil, without the
    /// circulant machinery.
    fn ring_formula(p: &RingParams) -> Vec<Complex64> {
        let total = p.sectors * p.points;
        let (l, m, r) = p.stencil();
        (0..total)
            .map(|q| {
                let w = Complex64::from_polar(1.0, 2.0 * PI * q as f64 / total as f64);
                real(m) + real(r) * w + real(l) * w.conj()
            })
            .collect()
    }

    #[test]
    fn ring_small_example() {
        // stencil [1, −2, 1] scaled by 1/h²
        let p = RingParams::new(4, 1, 0.0, 1.0);
        let j = make_ring(&p).unwrap();
        let h2 = p.spacing().powi(2);
        let expected: Vec<_> = [0.0, -2.0, -4.0, -2.0].iter().map(|v| real(v / h2)).collect();
        let full = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
        assert!(multiset_distance(&full, &expected) <= 1e-10 * spectral_radius(&expected));
        assert!(multiset_distance(&p.analytic_spectrum(), &expected) <= 1e-12 * spectral_radius(&expected));
        assert_eq!(p.first_row(), vec![real(-2.0 / h2), real(1.0 / h2), real(0.0), real(1.0 / h2)]);
    }

    #[test]
    fn pure_advection_is_neutral_with_central_stencil() {
        let p = RingParams {
            diffusivity: 0.0,
            scheme: AdvectionScheme::Central,
            ..RingParams::new(6, 5, 2.0, 1.0)
        };
        for lambda in p.analytic_spectrum() {
            assert!(lambda.re.abs() <= 1e-12);
        }
        let full = dense_spectrum(&make_ring(&p).unwrap().materialize_full(usize::MAX).unwrap());
        assert!(full.iter().all(|l| l.re.abs() <= 1e-10));
    }

    #[test]
    fn ring_rejects_bad_sizes() {
        assert!(make_ring_advection_diffusion(2, 4, 1.0, 1.0).is_err());
        assert!(make_ring_advection_diffusion(4, 0, 1.0, 1.0).is_err());
        assert!(make_ring_advection_diffusion(4, 2, -1.0, 1.0).is_err());
        assert!(make_rotating_vector_model(2, 2, 0.3).is_err());
        assert!(make_rotating_vector_model(3, 0, 0.3).is_err());
        assert!(make_random_sector_jacobian(3, 2, 0.0, 1).is_err());
        assert!(make_random_sector_jacobian(3, 2, 1.5, 1).is_err());
    }

    #[test]
    fn ring_nodal_diameter_counts_waves() {
        let j = make_ring_advection_diffusion(22, 3, 0.0, 1.0).unwrap();
        let h = Harmonic::new(21, 22).unwrap();
        let b = j.reduced_block(h).unwrap();
        let (_, v) = dense_eigs(&b.to_dense(), usize::MAX).unwrap().into_iter()
            .max_by(|a, b| a.0.re.total_cmp(&b.0.re)).unwrap();
        // normalize phase so the mode is real-dominant, then count sign changes
        let lifted = j.lift_to_annulus(&v, h).unwrap();
        let pivot = lifted.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let phase = pivot.conj() / pivot.norm();
        let re: Vec<f64> = lifted.iter().map(|z| (z * phase).re).collect();
        let changes = (0..re.len()).filter(|&i| re[i].signum() != re[(i + 1) % re.len()].signum()).count();
        assert_eq!(changes / 2, h.nodal_diameter());
        assert_eq!(h.nodal_diameter(), 1);
    }

    #[test]
    fn rotvec_uncoupled_is_local_spectrum() {
        let j = make_rotating_vector_model(5, 3, 0.0).unwrap();
        let k = CsrMatrix::from_triplets(
            2,
            2,
            (0..4).map(|e| (e / 2, e % 2, real(LOCAL_DYNAMICS[e / 2][e % 2]))),
        )
        .unwrap();
        let local = dense_spectrum(&k);
        let expected: Vec<_> = (0..15).flat_map(|_| local.clone()).collect();
        let full = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
        assert!(multiset_distance(&full, &expected) <= 1e-10);
        assert!(j.d_next().nnz() == 0 && j.d_prev().nnz() == 0);
    }

    #[test]
    fn rotvec_blocks_match_mesh_frame_construction() {
        let (m, n, coupling) = (7, 3, 0.4);
        let j = make_rotating_vector_model(m, n, coupling).unwrap();
        // assemble the mesh-frame neighbour blocks from global angles
        let theta = 2.0 * PI / m as f64;
        let phi = |g: f64| (g + 0.5) * theta / n as f64;
        let mut dn = Vec::new();
        push_block(&mut dn, n - 1, 0, framed(scale(COUPLING_NEXT, coupling), phi(n as f64 - 1.0), phi(n as f64)));
        let mut dp = Vec::new();
        push_block(&mut dp, 0, n - 1, framed(scale(COUPLING_PREV, coupling), phi(0.0), phi(-1.0)));
        let dn = CsrMatrix::from_triplets(2 * n, 2 * n, dn).unwrap();
        let dp = CsrMatrix::from_triplets(2 * n, 2 * n, dp).unwrap();
        let k = SectorJacobian::from_unrotated(m, j.d_self().clone(), dn, dp, j.layout().clone()).unwrap();
        assert!(k.d_next().to_dense().max_abs_diff(&j.d_next().to_dense()) <= 1e-14);
        assert!(k.d_prev().to_dense().max_abs_diff(&j.d_prev().to_dense()) <= 1e-14);
        assert_eq!(rotation_matrix(j.rotation(), 1).nnz(), 4 * n);
    }

    #[test]
    fn rotvec_reference_instance() {
        let j = make_rotating_vector_model(6, 2, 0.3).unwrap();
        let full = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
        let reduced = reduced_union(&j);
        assert!(multiset_distance(&full, &reduced) <= 1e-9);
        let wrong = reduced_union(&j.without_rotation());
        assert!(multiset_distance(&full, &wrong) > 1e-3);
    }

    #[test]
    fn random_dense_and_deterministic() {
        let a = make_random_sector_jacobian(3, 2, 1.0, 5).unwrap();
        for b in [a.d_self(), a.d_next(), a.d_prev()] {
            assert_eq!(b.nnz(), 4);
        }
        assert_eq!(a, make_random_sector_jacobian(3, 2, 1.0, 5).unwrap());
        assert_ne!(a, make_random_sector_jacobian(3, 2, 1.0, 6).unwrap());
        let single = make_random_sector_jacobian(1, 4, 0.5, 2).unwrap();
        assert_eq!(single.d_next().nnz() + single.d_prev().nnz(), 0);
        let rotating = make_random(&RandomParams { sectors: 4, dim: 6, density: 0.5, seed: 1, rotating: true }).unwrap();
        assert_eq!(rotating.layout().rotating_pairs(), &[(0, 1)]);
        assert_eq!(rotating.layout().points_per_sector(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_reduction_matches_formula(m in 3usize..=12, n in 1usize..=12, pe in 0.0f64..20.0, rate in 0.1f64..3.0) {
            let p = RingParams::new(m, n, pe, rate);
            let j = make_ring(&p).unwrap();
            let formula = ring_formula(&p);
            let radius = spectral_radius(&formula);
            prop_assert!(multiset_distance(&p.analytic_spectrum(), &formula) <= 1e-10 * radius);
            prop_assert!(multiset_distance(&reduced_union(&j), &formula) <= 1e-10 * radius);
            if m * n <= 150 {
                let full = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
                prop_assert!(multiset_distance(&full, &formula) <= 1e-10 * radius);
            }
        }

        #[test]
        fn rotvec_equivariance(m in 3usize..=7, n in 1usize..=3, coupling in 0.05f64..1.0, origin in 0usize..7) {
            let j = make_rotating_vector_model(m, n, coupling).unwrap();
            let a = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
            let b = dense_spectrum(&j.materialize_full_from_origin(usize::MAX, origin % m).unwrap());
            prop_assert!(multiset_distance(&a, &b) <= 1e-9 * spectral_radius(&a).max(1.0));
        }

        #[test]
        fn random_similarity_invariance(seed in any::<u64>(), m in 1usize..=6, n in 1usize..=8, density in 0.1f64..=1.0, rotating in any::<bool>()) {
            let j = make_random(&RandomParams { sectors: m, dim: n, density, seed, rotating }).unwrap();
            let full = dense_spectrum(&j.materialize_full(usize::MAX).unwrap());
            let reduced = reduced_union(&j);
            prop_assert!(multiset_distance(&full, &reduced) <= 1e-8 * spectral_radius(&full).max(1.0));
        }

        #[test]
        fn generators_round_trip_on_disk(seed in any::<u64>(), which in 0usize..3) {
            let j = match which {
                0 => make_ring_advection_diffusion(5, 3, 1.5, 2.0).unwrap(),
                1 => make_rotating_vector_model(4, 2, 0.7).unwrap(),
                _ => make_random(&RandomParams { sectors: 5, dim: 4, density: 0.6, seed, rotating: true }).unwrap(),
            };
            let dir = tempfile::tempdir().unwrap();
            j.write_dir(dir.path()).unwrap();
            prop_assert_eq!(SectorJacobian::read_dir(dir.path()).unwrap(), j);
        }
    }
}

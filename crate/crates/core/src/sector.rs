//! Cyclic-symmetric Jacobians described by one sector.
//!
//! The annulus is split into `M` sectors of `N` unknowns each. Sector `s` is
//! sector 0 rotated by `s·θ`, `θ = 2π/M`. Vector-valued unknowns (velocity
//! components, say) are expressed in the mesh-fixed frame, so the coupling
//! blocks of the full Jacobian `A` are not identical from sector to sector:
//!
//! ```text
//! A(m₁, m₂) = T^{m₁} · b_{(m₂−m₁) mod M} · T^{−m₂}
//! ```
//!
//! where `b_k = ∂R_0/∂Ũ_k` are the sector-0 blocks taken with respect to the
//! rotated unknowns `Ũ_k = T^{−k} U_k`. Then `A = 𝒯·B·𝒯⁻¹` with
//! `𝒯 = blockdiag(T⁰, …, T^{M−1})` and `B` block circulant.
//!
//! Only nearest-neighbour coupling is stored: `b_0` (`d_self`), `b_1`
//! (`d_next`, the positive-θ neighbour) and `b_{M−1}` (`d_prev`).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::circulant::{BlockCirculantOperator, Harmonic};
use crate::numeric::{mtx, sparse_linear_combination, unit_root, CsrMatrix};
use crate::{Error, Result};

pub const D_SELF_FILE: &str = "d_self.mtx";
pub const D_NEXT_FILE: &str = "d_next.mtx";
pub const D_PREV_FILE: &str = "d_prev.mtx";
pub const LAYOUT_FILE: &str = "layout.txt";

/// Per-sector unknown layout: `points_per_sector` grid points with
/// `vars_per_point` unknowns each, point-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout {
    points_per_sector: usize,
    vars_per_point: usize,
    rotating_pairs: Vec<(usize, usize)>,
}

impl DofLayout {
    /// `rotating_pairs` lists the per-point variable index pairs that form
    /// in-plane vector components; every other variable is a scalar.
    pub fn new(
        points_per_sector: usize,
        vars_per_point: usize,
        rotating_pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if points_per_sector == 0 || vars_per_point == 0 {
            return Err(Error::domain("layout needs at least one point and one variable"));
        }
        let mut seen = vec![false; vars_per_point];
        for &(a, b) in &rotating_pairs {
            for idx in [a, b] {
                if idx >= vars_per_point {
                    return Err(Error::domain(format!(
                        "rotating variable {idx} out of range for {vars_per_point} variables per point"
                    )));
                }
                if seen[idx] {
                    return Err(Error::domain(format!(
                        "rotating variable {idx} listed more than once"
                    )));
                }
                seen[idx] = true;
            }
        }
        Ok(Self {
            points_per_sector,
            vars_per_point,
            rotating_pairs,
        })
    }

    /// One unknown per point, nothing rotates.
    pub fn scalar(points_per_sector: usize) -> Result<Self> {
        Self::new(points_per_sector, 1, Vec::new())
    }

    pub fn points_per_sector(&self) -> usize {
        self.points_per_sector
    }

    pub fn vars_per_point(&self) -> usize {
        self.vars_per_point
    }

    pub fn rotating_pairs(&self) -> &[(usize, usize)] {
        &self.rotating_pairs
    }

    /// `N`, unknowns per sector.
    pub fn dim(&self) -> usize {
        self.points_per_sector * self.vars_per_point
    }

    pub fn without_rotation(&self) -> Self {
        Self {
            rotating_pairs: Vec::new(),
            ..self.clone()
        }
    }
}

/// Sector count plus layout; fixes the pitch rotation `T` (angle `2π/M`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSpec {
    sectors: usize,
    layout: DofLayout,
}

impl RotationSpec {
    pub fn new(sectors: usize, layout: DofLayout) -> Result<Self> {
        if sectors == 0 {
            return Err(Error::domain("sector count must be at least 1"));
        }
        Ok(Self { sectors, layout })
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn theta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.sectors as f64
    }
}

/// `T^power`: per grid point, a plane rotation by `power·θ` on every rotating
/// pair and identity on scalars. Negative powers give the inverse.
pub fn rotation_matrix(spec: &RotationSpec, power: i64) -> CsrMatrix {
    let layout = &spec.layout;
    let m = spec.sectors as i64;
    let reduced = power.rem_euclid(m) as usize;
    // cos and sin of power·θ, exact for quarter turns
    let root = unit_root(reduced, spec.sectors);
    let (cos, sin) = (root.re, root.im);
    let nv = layout.vars_per_point;
    let mut triplets = Vec::with_capacity(layout.dim() * 2);
    let mut rotating = vec![false; nv];
    for &(a, b) in &layout.rotating_pairs {
        rotating[a] = true;
        rotating[b] = true;
    }
    for p in 0..layout.points_per_sector {
        let base = p * nv;
        for v in 0..nv {
            if !rotating[v] {
                triplets.push((base + v, base + v, Complex64::new(1.0, 0.0)));
            }
        }
        for &(a, b) in &layout.rotating_pairs {
            let (ia, ib) = (base + a, base + b);
            triplets.push((ia, ia, Complex64::new(cos, 0.0)));
            triplets.push((ia, ib, Complex64::new(-sin, 0.0)));
            triplets.push((ib, ia, Complex64::new(sin, 0.0)));
            triplets.push((ib, ib, Complex64::new(cos, 0.0)));
        }
    }
    let n = layout.dim();
    CsrMatrix::from_triplets(n, n, triplets.into_iter().filter(|t| t.2 != Complex64::new(0.0, 0.0)))
        .expect("rotation entries lie inside the layout")
}

/// `min(m, M − m)`
pub fn nodal_diameter(h: Harmonic) -> usize {
    h.nodal_diameter()
}

/// Sector-0 Jacobian blocks in rotated unknowns plus the rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorJacobian {
    d_self: CsrMatrix,
    d_next: CsrMatrix,
    d_prev: CsrMatrix,
    rotation: RotationSpec,
}

impl SectorJacobian {
    /// Blocks are `∂R_0/∂Ũ_0`, `∂R_0/∂Ũ_1`, `∂R_0/∂Ũ_{M−1}`.
    pub fn new(
        sectors: usize,
        d_self: CsrMatrix,
        d_next: CsrMatrix,
        d_prev: CsrMatrix,
        layout: DofLayout,
    ) -> Result<Self> {
        let rotation = RotationSpec::new(sectors, layout)?;
        let n = rotation.layout.dim();
        for (name, b) in [("d_self", &d_self), ("d_next", &d_next), ("d_prev", &d_prev)] {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::domain(format!(
                    "{name} is {}x{}, layout requires {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        if sectors < 3 && d_next.nnz() > 0 && d_prev.nnz() > 0 {
            return Err(Error::domain(format!(
                "with {sectors} sectors the next and previous neighbours coincide; supply at most one coupling block"
            )));
        }
        Ok(Self {
            d_self,
            d_next,
            d_prev,
            rotation,
        })
    }

    /// Accepts neighbour blocks taken with respect to the mesh-frame unknowns
    /// (`∂R_0/∂U_1`, `∂R_0/∂U_{M−1}`) and converts them with `T^{±1}`.
    pub fn from_unrotated(
        sectors: usize,
        d_self: CsrMatrix,
        d_next_mesh: CsrMatrix,
        d_prev_mesh: CsrMatrix,
        layout: DofLayout,
    ) -> Result<Self> {
        let spec = RotationSpec::new(sectors, layout.clone())?;
        let d_next = d_next_mesh.matmul(&rotation_matrix(&spec, 1))?;
        let d_prev = d_prev_mesh.matmul(&rotation_matrix(&spec, -1))?;
        Self::new(sectors, d_self, d_next, d_prev, layout)
    }

    pub fn sectors(&self) -> usize {
        self.rotation.sectors
    }

    pub fn block_dim(&self) -> usize {
        self.d_self.nrows()
    }

    pub fn d_self(&self) -> &CsrMatrix {
        &self.d_self
    }

    pub fn d_next(&self) -> &CsrMatrix {
        &self.d_next
    }

    pub fn d_prev(&self) -> &CsrMatrix {
        &self.d_prev
    }

    pub fn rotation(&self) -> &RotationSpec {
        &self.rotation
    }

    pub fn layout(&self) -> &DofLayout {
        &self.rotation.layout
    }

    pub fn is_real(&self) -> bool {
        self.d_self.is_real() && self.d_next.is_real() && self.d_prev.is_real()
    }

    pub fn harmonics(&self) -> Vec<Harmonic> {
        Harmonic::all(self.sectors())
    }

    /// Neighbour blocks in mesh-frame unknowns: `(d_next·T⁻¹, d_prev·T)`.
    pub fn mesh_frame_neighbors(&self) -> (CsrMatrix, CsrMatrix) {
        let t = rotation_matrix(&self.rotation, 1);
        let t_inv = rotation_matrix(&self.rotation, -1);
        (
            self.d_next.matmul(&t_inv).expect("square blocks"),
            self.d_prev.matmul(&t).expect("square blocks"),
        )
    }

    /// The same operator with the change of variables skipped: mesh-frame
    /// neighbour blocks are used as if they were rotated-frame blocks and `T`
    /// is the identity. Its reduced spectra are wrong whenever the coupling
    /// does not commute with `T`; used as a negative control.
    pub fn without_rotation(&self) -> Self {
        let (next, prev) = self.mesh_frame_neighbors();
        Self {
            d_self: self.d_self.clone(),
            d_next: next,
            d_prev: prev,
            rotation: RotationSpec {
                sectors: self.sectors(),
                layout: self.layout().without_rotation(),
            },
        }
    }

    /// `b_0 = d_self`, `b_1 = d_next`, `b_{M−1} = d_prev`, others empty.
    /// Indices are taken modulo `M`, so for `M < 3` coinciding blocks add up.
    pub fn to_block_circulant(&self) -> BlockCirculantOperator {
        let m = self.sectors();
        let n = self.block_dim();
        let mut blocks = vec![CsrMatrix::zeros(n, n); m];
        for (k, b) in [(0, &self.d_self), (1 % m, &self.d_next), ((m - 1) % m, &self.d_prev)] {
            if b.nnz() == 0 && k != 0 {
                continue;
            }
            blocks[k] = if blocks[k].nnz() == 0 {
                b.clone()
            } else {
                let one = Complex64::new(1.0, 0.0);
                sparse_linear_combination(&[&blocks[k], b], &[one, one]).expect("equal dimensions")
            };
        }
        BlockCirculantOperator::new(blocks).expect("blocks share the layout dimension")
    }

    /// `B_m = d_self + ρ_m·d_next + ρ_m^{M−1}·d_prev`
    pub fn reduced_block(&self, h: Harmonic) -> Result<CsrMatrix> {
        let m = self.sectors();
        if h.sectors() != m {
            return Err(Error::domain(format!(
                "harmonic for {} sectors used with a {m}-sector Jacobian",
                h.sectors()
            )));
        }
        sparse_linear_combination(
            &[&self.d_self, &self.d_next, &self.d_prev],
            &[Complex64::new(1.0, 0.0), h.root_pow(1), h.root_pow(m - 1)],
        )
    }

    /// Full `MN×MN` Jacobian in mesh-frame unknowns.
    pub fn materialize_full(&self, budget: usize) -> Result<CsrMatrix> {
        self.materialize_full_from_origin(budget, 0)
    }

    /// Full Jacobian with sector `origin` taken as the reference sector:
    /// block `(m₁, m₂)` is `T^{m₁+origin}·b_{(m₂−m₁) mod M}·T^{−(m₂+origin)}`.
    pub fn materialize_full_from_origin(&self, budget: usize, origin: usize) -> Result<CsrMatrix> {
        let (m, n) = (self.sectors(), self.block_dim());
        if m * n > budget {
            return Err(Error::BudgetExceeded {
                required: m * n,
                budget,
            });
        }
        let op = self.to_block_circulant();
        let powers: Vec<CsrMatrix> = (0..m)
            .map(|p| rotation_matrix(&self.rotation, p as i64))
            .collect();
        let inverse: Vec<CsrMatrix> = (0..m)
            .map(|p| rotation_matrix(&self.rotation, -(p as i64)))
            .collect();
        let mut triplets = Vec::new();
        for (k, block) in op.blocks().iter().enumerate() {
            if block.nnz() == 0 {
                continue;
            }
            for row in 0..m {
                let col = (row + k) % m;
                let a = powers[(row + origin) % m]
                    .matmul(block)?
                    .matmul(&inverse[(col + origin) % m])?;
                triplets.extend(a.triplets().map(|(r, c, v)| (row * n + r, col * n + c, v)));
            }
        }
        CsrMatrix::from_triplets(m * n, m * n, triplets)
    }

    /// `𝒯w`: segment `s` is `ρ_m^s·T^s·v`.
    pub fn lift_to_annulus(&self, v: &[Complex64], h: Harmonic) -> Result<Vec<Complex64>> {
        let (m, n) = (self.sectors(), self.block_dim());
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        if h.sectors() != m {
            return Err(Error::domain("harmonic does not match the sector count"));
        }
        let mut out = Vec::with_capacity(m * n);
        for s in 0..m {
            let phase = h.root_pow(s);
            let rotated = rotation_matrix(&self.rotation, s as i64).spmv(v)?;
            out.extend(rotated.into_iter().map(|x| phase * x));
        }
        Ok(out)
    }

    /// Writes the three blocks and the layout descriptor into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        mtx::write(&dir.join(D_SELF_FILE), &self.d_self)?;
        mtx::write(&dir.join(D_NEXT_FILE), &self.d_next)?;
        mtx::write(&dir.join(D_PREV_FILE), &self.d_prev)?;
        let path = dir.join(LAYOUT_FILE);
        fs::write(&path, self.layout_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(LAYOUT_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let (sectors, layout) = parse_layout(&text, &path)?;
        Self::new(
            sectors,
            mtx::read(&dir.join(D_SELF_FILE))?,
            mtx::read(&dir.join(D_NEXT_FILE))?,
            mtx::read(&dir.join(D_PREV_FILE))?,
            layout,
        )
    }

    fn layout_text(&self) -> String {
        let layout = self.layout();
        let pairs: Vec<String> = layout
            .rotating_pairs
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect();
        let mut s = String::new();
        writeln!(s, "M = {}", self.sectors()).unwrap();
        writeln!(s, "points_per_sector = {}", layout.points_per_sector).unwrap();
        writeln!(s, "vars_per_point = {}", layout.vars_per_point).unwrap();
        writeln!(s, "rotating_pairs = {}", pairs.join(",")).unwrap();
        s
    }
}

/// Parses `key = value` lines; `rotating_pairs` is a comma-separated list of
/// `a:b` index pairs (possibly empty).
pub fn parse_layout(text: &str, path: &Path) -> Result<(usize, DofLayout)> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut sectors = None;
    let mut points = None;
    let mut vars = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(idx + 1, "expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let number = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| err(idx + 1, format!("invalid value for {key}: `{v}`")))
        };
        match key {
            "M" => sectors = Some(number(value)?),
            "points_per_sector" => points = Some(number(value)?),
            "vars_per_point" => vars = Some(number(value)?),
            "rotating_pairs" => {
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (a, b) = item
                        .split_once(':')
                        .ok_or_else(|| err(idx + 1, format!("rotating pair `{item}` must be `a:b`")))?;
                    pairs.push((number(a.trim())?, number(b.trim())?));
                }
            }
            other => return Err(err(idx + 1, format!("unknown key `{other}`"))),
        }
    }
    let missing = |k: &str| err(0, format!("missing key `{k}`"));
    let sectors = sectors.ok_or_else(|| missing("M"))?;
    let layout = DofLayout::new(
        points.ok_or_else(|| missing("points_per_sector"))?,
        vars.ok_or_else(|| missing("vars_per_point"))?,
        pairs,
    )?;
    Ok((sectors, layout))
}

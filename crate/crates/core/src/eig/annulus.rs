//! Whole-annulus spectra, computed either per harmonic on the reduced
//! sector problems or directly on the assembled full operator.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::krylov::{fmt_complex, shift_invert_eigs, EigenPair, ShiftInvertConfig};
use crate::circulant::Harmonic;
use crate::numeric::CsrMatrix;
use crate::sector::SectorJacobian;
use crate::Result;

/// Relative merge distance for eigenvalues found from several shifts.
pub const DEDUP_RELATIVE_TOL: f64 = 1e-6;

/// Largest `M·N` accepted by [`solve_full_annulus`].
pub const DEFAULT_SPARSE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// One sparse solve on the assembled `MN×MN` operator.
    FullAnnulus,
    /// `M` independent `N×N` solves on the reduced blocks.
    Reduced,
}

impl Method {
    pub fn number(self) -> u8 {
        match self {
            Method::FullAnnulus => 1,
            Method::Reduced => 2,
        }
    }
}

/// Instrumentation for one `(harmonic, shift)` solve.
#[derive(Debug, Clone)]
pub struct SolveStats {
    pub harmonic: Option<Harmonic>,
    pub shift: Complex64,
    pub shift_used: Complex64,
    pub perturbed: bool,
    pub operator_dim: usize,
    pub operator_nnz: usize,
    pub factor_nnz: usize,
    pub restarts: usize,
    pub requested: usize,
    pub found: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveWarning {
    pub harmonic: Option<Harmonic>,
    pub shift: Option<Complex64>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub method: Method,
    /// Sorted by harmonic, then `|λ − σ|`.
    pub pairs: Vec<EigenPair>,
    pub sectors: usize,
    pub block_dim: usize,
    pub scale: f64,
    pub dedup_tolerance: f64,
    /// Pairs found before merging duplicates across shifts.
    pub raw_count: usize,
    /// Wall time summed over the solves of each harmonic.
    pub seconds_per_harmonic: Vec<(Option<Harmonic>, f64)>,
    pub total_seconds: f64,
    pub stats: Vec<SolveStats>,
    pub warnings: Vec<SolveWarning>,
}

impl SpectrumReport {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn for_harmonic(&self, h: Harmonic) -> Vec<&EigenPair> {
        self.pairs.iter().filter(|p| p.harmonic == Some(h)).collect()
    }

    pub fn peak_factor_nnz(&self) -> usize {
        self.stats.iter().map(|s| s.factor_nnz).max().unwrap_or(0)
    }

    pub fn operator_dim(&self) -> usize {
        self.stats.first().map_or(0, |s| s.operator_dim)
    }

    pub fn any_perturbed(&self) -> bool {
        self.stats.iter().any(|s| s.perturbed)
    }
}

fn harmonic_key(h: Option<Harmonic>) -> usize {
    h.map_or(0, Harmonic::index)
}

/// Within each harmonic, keeps the smallest-residual pair of every group
/// closer than `DEDUP_RELATIVE_TOL·max(1, |λ|)`.
pub fn deduplicate(mut pairs: Vec<EigenPair>) -> Vec<EigenPair> {
    pairs.sort_by(|a, b| {
        harmonic_key(a.harmonic)
            .cmp(&harmonic_key(b.harmonic))
            .then(a.residual.total_cmp(&b.residual))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    let mut kept: Vec<EigenPair> = Vec::with_capacity(pairs.len());
    let mut group_start = 0;
    for p in pairs {
        if kept.last().map(|k| k.harmonic) != Some(p.harmonic) {
            group_start = kept.len();
        }
        let duplicate = kept[group_start..]
            .iter()
            .any(|k| (k.lambda - p.lambda).norm() < DEDUP_RELATIVE_TOL * k.lambda.norm().max(1.0));
        if !duplicate {
            kept.push(p);
        }
    }
    sort_report_pairs(&mut kept);
    kept
}

fn sort_report_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| {
        harmonic_key(a.harmonic)
            .cmp(&harmonic_key(b.harmonic))
            .then((a.lambda - a.shift).norm().total_cmp(&(b.lambda - b.shift).norm()))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
}

struct Job<'a> {
    harmonic: Option<Harmonic>,
    shift: Complex64,
    operator: &'a CsrMatrix,
}

fn run_jobs(method: Method, jobs: Vec<Job<'_>>, cfg: &ShiftInvertConfig, sectors: usize, block_dim: usize) -> SpectrumReport {
    let start = Instant::now();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            let t0 = Instant::now();
            let out = shift_invert_eigs(job.operator, job.shift, cfg.eigs_per_shift, cfg);
            (out, t0.elapsed().as_secs_f64())
        })
        .collect();

    let mut raw = Vec::new();
    let mut stats = Vec::new();
    let mut warnings = Vec::new();
    let mut seconds_per_harmonic: Vec<(Option<Harmonic>, f64)> = Vec::new();
    for (job, (out, seconds)) in jobs.iter().zip(results) {
        match seconds_per_harmonic.last_mut() {
            Some((h, t)) if *h == job.harmonic => *t += seconds,
            _ => seconds_per_harmonic.push((job.harmonic, seconds)),
        }
        match out {
            Ok(out) => {
                if let Some(msg) = &out.warning {
                    warnings.push(SolveWarning {
                        harmonic: job.harmonic,
                        shift: Some(job.shift),
                        message: msg.clone(),
                    });
                }
                if out.perturbed {
                    warnings.push(SolveWarning {
                        harmonic: job.harmonic,
                        shift: Some(job.shift),
                        message: format!(
                            "shift {} is numerically an eigenvalue; factored at {} instead",
                            fmt_complex(job.shift),
                            fmt_complex(out.shift_used)
                        ),
                    });
                }
                stats.push(SolveStats {
                    harmonic: job.harmonic,
                    shift: job.shift,
                    shift_used: out.shift_used,
                    perturbed: out.perturbed,
                    operator_dim: job.operator.nrows(),
                    operator_nnz: job.operator.nnz(),
                    factor_nnz: out.factor_nnz,
                    restarts: out.restarts,
                    requested: out.requested,
                    found: out.pairs.len(),
                    seconds,
                });
                raw.extend(out.pairs.into_iter().map(|mut p| {
                    p.harmonic = job.harmonic;
                    p
                }));
            }
            Err(e) => warnings.push(SolveWarning {
                harmonic: job.harmonic,
                shift: Some(job.shift),
                message: e.to_string(),
            }),
        }
    }
    let raw_count = raw.len();
    SpectrumReport {
        method,
        pairs: deduplicate(raw),
        sectors,
        block_dim,
        scale: cfg.scale,
        dedup_tolerance: DEDUP_RELATIVE_TOL,
        raw_count,
        seconds_per_harmonic,
        total_seconds: start.elapsed().as_secs_f64(),
        stats,
        warnings,
    }
}

fn scaled(a: CsrMatrix, scale: f64) -> CsrMatrix {
    if scale == 1.0 {
        a
    } else {
        a.scaled(Complex64::new(1.0 / scale, 0.0))
    }
}

/// Reduced-problem spectrum: for every harmonic `m`, eigenvalues of
/// `B_m / scale` near each shift. Failures of single solves become warnings.
pub fn solve_annulus_spectrum(j: &SectorJacobian, harmonics: &[Harmonic], cfg: &ShiftInvertConfig) -> Result<SpectrumReport> {
    cfg.validate()?;
    let m = j.sectors();
    let mut unique: Vec<Harmonic> = harmonics.to_vec();
    unique.sort_by_key(|h| h.index());
    unique.dedup();
    let mut warnings = Vec::new();
    let mut blocks = Vec::with_capacity(unique.len());
    for h in unique {
        match j.reduced_block(h) {
            Ok(b) => blocks.push((h, scaled(b, cfg.scale))),
            Err(e) => warnings.push(SolveWarning {
                harmonic: Some(h),
                shift: None,
                message: format!("{e} (harmonic {} for {m} sectors)", h.index()),
            }),
        }
    }
    let jobs: Vec<Job<'_>> = blocks
        .iter()
        .flat_map(|(h, b)| {
            cfg.shifts.iter().map(move |&shift| Job {
                harmonic: Some(*h),
                shift,
                operator: b,
            })
        })
        .collect();
    let mut report = run_jobs(Method::Reduced, jobs, cfg, m, j.block_dim());
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok(report)
}

/// Whole-annulus spectrum from the sparse full operator `A / scale`.
pub fn solve_full_annulus(j: &SectorJacobian, cfg: &ShiftInvertConfig, budget: usize) -> Result<SpectrumReport> {
    cfg.validate()?;
    let a = scaled(j.materialize_full(budget)?, cfg.scale);
    let jobs = cfg
        .shifts
        .iter()
        .map(|&shift| Job {
            harmonic: None,
            shift,
            operator: &a,
        })
        .collect();
    Ok(run_jobs(Method::FullAnnulus, jobs, cfg, j.sectors(), j.block_dim()))
}

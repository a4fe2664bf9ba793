//! Command-line front end: generate surrogate sector Jacobians, compute
//! annulus spectra with the full or the reduced method, check the reduction
//! against a dense oracle, and compare the cost of both methods.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use cyclosym::circulant::Harmonic;
use cyclosym::eig::{
    dense_eigenvalues, dense_eigs, solve_annulus_spectrum, solve_full_annulus, ShiftInvertConfig, SpectrumReport,
    DEFAULT_SPARSE_BUDGET,
};
use cyclosym::models::{make_random, make_ring_advection_diffusion, make_rotating_vector_model, RandomParams};
use cyclosym::numeric::norm2;
use cyclosym::sector::SectorJacobian;
use cyclosym::spectrum::{greedy_match, spectral_radius};
use cyclosym::DEFAULT_DENSE_BUDGET;

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const TOOL_VERSION: &str = concat!("cyclosym ", env!("CARGO_PKG_VERSION"));

/// Exit status of a failed `verify`.
pub const EXIT_MISMATCH: u8 = 1;
/// Exit status of structural errors (bad input, I/O).
pub const EXIT_ERROR: u8 = 2;

pub const CSV_HEADER: &str = "harmonic,nodal_diameter,lambda_re,lambda_im,residual,shift_re,shift_im";
pub const BENCH_HEADER: &str =
    "method,operator_dim,operator_nnz,solves,factor_nnz_per_solve,factor_nnz_total,wall_seconds,eigenvalues";

#[derive(Debug, Parser)]
#[command(name = "cyclosym", version, about = "Spectra of cyclic-symmetric sparse operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a surrogate sector Jacobian directory.
    Gen(GenArgs),
    /// Compute eigenvalues near the shifts and write a spectrum CSV.
    Eig(EigArgs),
    /// Compare the reduced spectra with the dense spectrum of the full operator.
    Verify(VerifyArgs),
    /// Report time and memory of both methods.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Ring,
    Rotvec,
    Random,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Ring => "ring",
            Model::Rotvec => "rotvec",
            Model::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub model: Model,
    /// Sector count M [ring: 22, rotvec: 6, random: 6]
    #[arg(long)]
    pub sectors: Option<usize>,
    /// Points per sector (ring, rotvec) or sector dimension N (random) [ring: 24, rotvec: 2, random: 8]
    #[arg(long)]
    pub points: Option<usize>,
    /// Advection speed of the ring model
    #[arg(long, default_value_t = 1.0)]
    pub peclet: f64,
    /// Factor applied to the whole ring operator
    #[arg(long, default_value_t = 1.0)]
    pub rotation_rate: f64,
    /// Neighbour coupling strength of the rotating vector model
    #[arg(long, default_value_t = 0.3)]
    pub coupling: f64,
    /// Fill probability of random blocks
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Give random blocks a rotating variable pair
    #[arg(long)]
    pub rotating: bool,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// whole annulus
    #[value(name = "1")]
    Full,
    /// per-harmonic reduced blocks
    #[value(name = "2")]
    Reduced,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Comma-separated complex shifts, e.g. "0+1i,0+2i"
    #[arg(long, default_value = "0+1i,0+2i,0+3i", allow_hyphen_values = true)]
    pub shifts: String,
    /// Eigenvalues per shift
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// The operator is divided by this before solving
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Residual bound for accepted eigenpairs
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Krylov subspace size [max(20, 2k+1)]
    #[arg(long)]
    pub subspace: Option<usize>,
    #[arg(long, default_value_t = 300)]
    pub max_restarts: usize,
    /// Seed of the Krylov start vector
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EigArgs {
    /// Sector Jacobian directory
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "2")]
    pub method: MethodArg,
    /// "all", or a comma list of indices and ranges such as "0,3-5"
    #[arg(long, default_value = "all")]
    pub harmonics: String,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Largest M·N accepted by method 1
    #[arg(long, default_value_t = DEFAULT_SPARSE_BUDGET)]
    pub budget: usize,
    /// Skip the frame rotation (test only; gives wrong spectra)
    #[arg(long)]
    pub no_rotation: bool,
    /// Spectrum CSV; a run summary is written next to it
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Bound on the matched distance, relative to max(1, spectral radius)
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Largest M·N for the dense oracle
    #[arg(long, default_value_t = DEFAULT_DENSE_BUDGET)]
    pub budget: usize,
    /// Skip the frame rotation (negative control)
    #[arg(long)]
    pub no_rotation: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, default_value_t = DEFAULT_SPARSE_BUDGET)]
    pub budget: usize,
    /// Benchmark CSV
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `a+bi`, `a-bi`, `bi`, `a`, `i`, `-i`; `j` is accepted for `i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || anyhow!("invalid complex number `{text}` (expected e.g. `0+1i`)");
    if s.is_empty() {
        return Err(bad());
    }
    let imaginary = s.ends_with('i') || s.ends_with('j');
    let body = if imaginary { &s[..s.len() - 1] } else { "" };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coefficient = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match split {
        _ if !imaginary => Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(k) => Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, coefficient(&body[k..])?),
        None => Complex64::new(0.0, coefficient(body)?),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

pub fn format_complex(z: Complex64) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "" } else { "+" }, z.im)
}

pub fn parse_shifts(text: &str) -> Result<Vec<Complex64>> {
    let shifts: Vec<Complex64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<_>>()?;
    if shifts.is_empty() {
        bail!("at least one shift is required");
    }
    Ok(shifts)
}

pub fn parse_harmonics(text: &str, sectors: usize) -> Result<Vec<Harmonic>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(Harmonic::all(sectors));
    }
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (lo, hi) = match item.split_once('-') {
            Some((a, b)) => (a.trim().parse::<usize>()?, b.trim().parse::<usize>()?),
            None => {
                let v = item.parse::<usize>().with_context(|| format!("invalid harmonic `{item}`"))?;
                (v, v)
            }
        };
        if lo > hi {
            bail!("empty harmonic range `{item}`");
        }
        for m in lo..=hi {
            out.push(Harmonic::new(m, sectors)?);
        }
    }
    if out.is_empty() {
        bail!("no harmonics selected");
    }
    out.sort_by_key(|h| h.index());
    out.dedup();
    Ok(out)
}

impl SolveArgs {
    pub fn config(&self) -> Result<ShiftInvertConfig> {
        let cfg = ShiftInvertConfig {
            shifts: parse_shifts(&self.shifts)?,
            eigs_per_shift: self.k,
            subspace_dim: self.subspace.unwrap_or(20.max(2 * self.k + 1)),
            tol: self.tol,
            max_restarts: self.max_restarts,
            scale: self.scale,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write into {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

impl GenArgs {
    fn sectors(&self) -> usize {
        self.sectors.unwrap_or(match self.model {
            Model::Ring => 22,
            Model::Rotvec | Model::Random => 6,
        })
    }

    fn points(&self) -> usize {
        self.points.unwrap_or(match self.model {
            Model::Ring => 24,
            Model::Rotvec => 2,
            Model::Random => 8,
        })
    }

    pub fn build(&self) -> Result<SectorJacobian> {
        let (m, n) = (self.sectors(), self.points());
        Ok(match self.model {
            Model::Ring => make_ring_advection_diffusion(m, n, self.peclet, self.rotation_rate)?,
            Model::Rotvec => make_rotating_vector_model(m, n, self.coupling)?,
            Model::Random => make_random(&RandomParams {
                sectors: m,
                dim: n,
                density: self.density,
                seed: self.seed,
                rotating: self.rotating,
            })?,
        })
    }

    /// `key = value` lines with every parameter the model reads.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        writeln!(s, "tool = {TOOL_VERSION}").unwrap();
        writeln!(s, "model = {}", self.model.name()).unwrap();
        writeln!(s, "sectors = {}", self.sectors()).unwrap();
        writeln!(s, "points = {}", self.points()).unwrap();
        match self.model {
            Model::Ring => {
                writeln!(s, "peclet = {}", self.peclet).unwrap();
                writeln!(s, "rotation_rate = {}", self.rotation_rate).unwrap();
            }
            Model::Rotvec => writeln!(s, "coupling = {}", self.coupling).unwrap(),
            Model::Random => {
                writeln!(s, "density = {}", self.density).unwrap();
                writeln!(s, "seed = {}", self.seed).unwrap();
                writeln!(s, "rotating = {}", self.rotating).unwrap();
            }
        }
        s
    }

    /// Inverse of [`GenArgs::manifest`]; `out` is set to `dir`.
    pub fn from_manifest(text: &str, dir: &Path) -> Result<Self> {
        let mut args = GenArgs {
            model: Model::Ring,
            sectors: None,
            points: None,
            peclet: 1.0,
            rotation_rate: 1.0,
            coupling: 0.3,
            density: 0.5,
            seed: 0,
            rotating: false,
            out: dir.to_path_buf(),
        };
        let mut model = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("malformed manifest line `{line}`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tool" => {}
                "model" => {
                    model = Some(Model::from_str(value, true).map_err(|e| anyhow!("unknown model `{value}`: {e}"))?)
                }
                "sectors" => args.sectors = Some(value.parse()?),
                "points" => args.points = Some(value.parse()?),
                "peclet" => args.peclet = value.parse()?,
                "rotation_rate" => args.rotation_rate = value.parse()?,
                "coupling" => args.coupling = value.parse()?,
                "density" => args.density = value.parse()?,
                "seed" => args.seed = value.parse()?,
                "rotating" => args.rotating = value.parse()?,
                other => bail!("unknown manifest key `{other}`"),
            }
        }
        args.model = model.ok_or_else(|| anyhow!("manifest names no model"))?;
        Ok(args)
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<String> {
    let j = args.build()?;
    j.write_dir(&args.out)?;
    write_atomic(&args.out.join(MANIFEST_FILE), &args.manifest())?;
    Ok(format!(
        "wrote {} model: M = {}, N = {} to {}",
        args.model.name(),
        j.sectors(),
        j.block_dim(),
        args.out.display()
    ))
}

fn load(input: &Path, no_rotation: bool) -> Result<SectorJacobian> {
    let j = SectorJacobian::read_dir(input).with_context(|| format!("cannot load sector Jacobian from {}", input.display()))?;
    Ok(if no_rotation { j.without_rotation() } else { j })
}

/// Spectrum rows sorted by harmonic, then imaginary, then real part.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut pairs: Vec<_> = report.pairs.iter().collect();
    pairs.sort_by(|a, b| {
        a.harmonic
            .map(Harmonic::index)
            .cmp(&b.harmonic.map(Harmonic::index))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
    });
    let mut s = String::with_capacity(96 * (pairs.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in pairs {
        let (h, nd) = match p.harmonic {
            Some(h) => (h.index().to_string(), h.nodal_diameter().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(s, "{h},{nd},{},{},{:e},{},{}", p.lambda.re, p.lambda.im, p.residual, p.shift.re, p.shift.im).unwrap();
    }
    s
}

pub fn summary_text(report: &SpectrumReport, cfg: &ShiftInvertConfig) -> String {
    let mut s = String::new();
    let dim = report.operator_dim();
    writeln!(s, "tool = {TOOL_VERSION}").unwrap();
    writeln!(s, "method = {}", report.method.number()).unwrap();
    writeln!(s, "sectors = {}", report.sectors).unwrap();
    writeln!(s, "block_dim = {}", report.block_dim).unwrap();
    writeln!(s, "operator_dim = {dim}").unwrap();
    writeln!(s, "scale = {}", report.scale).unwrap();
    let shifts: Vec<String> = cfg.shifts.iter().map(|&z| format_complex(z)).collect();
    writeln!(s, "shifts = {}", shifts.join(",")).unwrap();
    writeln!(s, "eigs_per_shift = {}", cfg.eigs_per_shift).unwrap();
    writeln!(s, "tol = {:e}", cfg.tol).unwrap();
    writeln!(s, "solves = {}", report.stats.len()).unwrap();
    writeln!(s, "eigenvalues_before_dedup = {}", report.raw_count).unwrap();
    writeln!(s, "eigenvalues = {}", report.pairs.len()).unwrap();
    writeln!(s, "duplicates_removed = {}", report.raw_count - report.pairs.len()).unwrap();
    writeln!(s, "dedup_tolerance = {:e} * max(1, |lambda|)", report.dedup_tolerance).unwrap();
    writeln!(s, "peak_factor_nnz_per_solve = {}", report.peak_factor_nnz()).unwrap();
    writeln!(s, "total_seconds = {:.6}", report.total_seconds).unwrap();
    writeln!(s, "perturbed_shifts = {}", report.stats.iter().filter(|x| x.perturbed).count()).unwrap();
    for (h, secs) in &report.seconds_per_harmonic {
        match h {
            Some(h) => writeln!(s, "seconds[harmonic {}] = {secs:.6}", h.index()).unwrap(),
            None => writeln!(s, "seconds[annulus] = {secs:.6}").unwrap(),
        }
    }
    for x in &report.stats {
        let label = x.harmonic.map_or("annulus".to_string(), |h| format!("harmonic {}", h.index()));
        writeln!(
            s,
            "solve[{label}, shift {}] = found {}/{}, restarts {}, factor_nnz {}",
            format_complex(x.shift),
            x.found,
            x.requested,
            x.restarts,
            x.factor_nnz
        )
        .unwrap();
    }
    writeln!(s, "warnings = {}", report.warnings.len()).unwrap();
    for w in &report.warnings {
        let label = w.harmonic.map_or("annulus".to_string(), |h| format!("harmonic {}", h.index()));
        writeln!(s, "warning[{label}] = {}", w.message).unwrap();
    }
    s
}

pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".summary.txt");
    out.with_file_name(name)
}

pub fn run_eig(args: &EigArgs) -> Result<SpectrumReport> {
    let j = load(&args.input, args.no_rotation)?;
    let cfg = args.solve.config()?;
    Ok(match args.method {
        MethodArg::Full => solve_full_annulus(&j, &cfg, args.budget)?,
        MethodArg::Reduced => {
            let harmonics = parse_harmonics(&args.harmonics, j.sectors())?;
            solve_annulus_spectrum(&j, &harmonics, &cfg)?
        }
    })
}

pub fn cmd_eig(args: &EigArgs) -> Result<String> {
    let report = run_eig(args)?;
    let cfg = args.solve.config()?;
    write_atomic(&args.out, &spectrum_csv(&report))?;
    write_atomic(&summary_path(&args.out), &summary_text(&report, &cfg))?;
    let mut msg = format!(
        "method {}: {} eigenvalues ({} before dedup) written to {}",
        report.method.number(),
        report.pairs.len(),
        report.raw_count,
        args.out.display()
    );
    for w in &report.warnings {
        let label = w.harmonic.map_or("annulus".to_string(), |h| format!("harmonic {}", h.index()));
        write!(msg, "\nwarning [{label}]: {}", w.message).unwrap();
    }
    Ok(msg)
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub dim: usize,
    pub max_distance: f64,
    pub spectral_radius: f64,
    pub max_lift_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Verification {
    pub fn threshold(&self) -> f64 {
        self.tol * self.spectral_radius.max(1.0)
    }

    pub fn render(&self) -> String {
        format!(
            "full dimension: {}\nmax matched distance: {:e}\nmax lift residual: {:e}\nspectral radius: {:e}\nthreshold: {:e} (tol {:e} x max(1, radius))\n{}",
            self.dim,
            self.max_distance,
            self.max_lift_residual,
            self.spectral_radius,
            self.threshold(),
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Dense spectrum of the full operator against the union of the dense
/// spectra of all reduced blocks, plus lift residuals of every reduced pair.
pub fn run_verify(args: &VerifyArgs) -> Result<Verification> {
    let j = load(&args.input, false)?;
    let dim = j.sectors() * j.block_dim();
    if dim > args.budget {
        bail!(
            "the full operator has dimension {dim}, above the dense budget of {}; use a smaller instance",
            args.budget
        );
    }
    let a = j.materialize_full(args.budget)?;
    let oracle = dense_eigenvalues(&a.to_dense(), args.budget)?;
    let reduced_source = if args.no_rotation { j.without_rotation() } else { j.clone() };
    let mut reduced = Vec::with_capacity(dim);
    let mut max_lift_residual = 0.0f64;
    for h in reduced_source.harmonics() {
        let b = reduced_source.reduced_block(h)?;
        for (lambda, v) in dense_eigs(&b.to_dense(), args.budget)? {
            let x = reduced_source.lift_to_annulus(&v, h)?;
            let ax = a.spmv(&x)?;
            let r: Vec<Complex64> = ax.iter().zip(&x).map(|(p, q)| p - lambda * q).collect();
            max_lift_residual = max_lift_residual.max(norm2(&r) / norm2(&x));
            reduced.push(lambda);
        }
    }
    let matching = greedy_match(&oracle, &reduced);
    let radius = spectral_radius(&oracle);
    let mut v = Verification {
        dim,
        max_distance: matching.max_distance,
        spectral_radius: radius,
        max_lift_residual,
        tol: args.tol,
        pass: false,
    };
    v.pass = oracle.len() == reduced.len() && v.max_distance <= v.threshold() && max_lift_residual <= v.threshold();
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub method: u8,
    pub operator_dim: usize,
    pub operator_nnz: usize,
    pub solves: usize,
    pub factor_nnz_per_solve: usize,
    pub factor_nnz_total: usize,
    pub wall_seconds: f64,
    pub eigenvalues: usize,
}

impl BenchRow {
    fn from_report(report: &SpectrumReport, seconds: f64) -> Self {
        Self {
            method: report.method.number(),
            operator_dim: report.operator_dim(),
            operator_nnz: report.stats.iter().map(|s| s.operator_nnz).max().unwrap_or(0),
            solves: report.stats.len(),
            factor_nnz_per_solve: report.peak_factor_nnz(),
            factor_nnz_total: report.stats.iter().map(|s| s.factor_nnz).sum(),
            wall_seconds: seconds,
            eigenvalues: report.pairs.len(),
        }
    }

    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{}",
            self.method,
            self.operator_dim,
            self.operator_nnz,
            self.solves,
            self.factor_nnz_per_solve,
            self.factor_nnz_total,
            self.wall_seconds,
            self.eigenvalues
        )
    }
}

pub fn run_bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let j = load(&args.input, false)?;
    let cfg = args.solve.config()?;
    let t0 = Instant::now();
    let full = solve_full_annulus(&j, &cfg, args.budget)?;
    let full_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let reduced = solve_annulus_spectrum(&j, &j.harmonics(), &cfg)?;
    let reduced_secs = t1.elapsed().as_secs_f64();
    Ok(vec![BenchRow::from_report(&full, full_secs), BenchRow::from_report(&reduced, reduced_secs)])
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String> {
    let rows = run_bench(args)?;
    write_atomic(&args.out, &bench_csv(&rows))?;
    let mut msg = String::new();
    for r in &rows {
        writeln!(
            msg,
            "method {}: dimension {}, factor nnz per solve {}, {} solves, {:.3} s",
            r.method, r.operator_dim, r.factor_nnz_per_solve, r.solves, r.wall_seconds
        )
        .unwrap();
    }
    write!(msg, "written to {}", args.out.display()).unwrap();
    Ok(msg)
}

pub fn run(cli: Cli) -> ExitCode {
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|m| (m, true)),
        Command::Eig(a) => cmd_eig(a).map(|m| (m, true)),
        Command::Bench(a) => cmd_bench(a).map(|m| (m, true)),
        Command::Verify(a) => run_verify(a).map(|v| (v.render(), v.pass)),
    };
    match outcome {
        Ok((msg, ok)) => {
            println!("{msg}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

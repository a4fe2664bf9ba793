use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cyclosym::eig::dense_eigenvalues;
use cyclosym::sector::SectorJacobian;
use cyclosym::spectrum::distance_to_set;
use cyclosym::Complex64;
use cyclosym_cli::{GenArgs, MANIFEST_FILE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclosym"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", p(&out)]);
    ok(&all);
    out
}

struct Row {
    harmonic: String,
    nodal_diameter: String,
    lambda: Complex64,
    residual: f64,
}

fn read_csv(path: &Path) -> Vec<Row> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), cyclosym_cli::CSV_HEADER);
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7);
            Row {
                harmonic: f[0].to_string(),
                nodal_diameter: f[1].to_string(),
                lambda: Complex64::new(f[2].parse().unwrap(), f[3].parse().unwrap()),
                residual: f[4].parse().unwrap(),
            }
        })
        .collect()
}

fn summary_value(csv: &Path, key: &str) -> String {
    let text = fs::read_to_string(cyclosym_cli::summary_path(csv)).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("summary has no `{key}`"))
}

#[test]
fn gen_ring_writes_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "262", "--peclet", "10"]);
    for f in ["d_self.mtx", "d_next.mtx", "d_prev.mtx", "layout.txt", MANIFEST_FILE] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    let manifest = fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("tool = cyclosym "));
    assert!(manifest.contains("peclet = 10"));
    let j = SectorJacobian::read_dir(&dir).unwrap();
    assert_eq!((j.sectors(), j.block_dim()), (22, 262));
}

#[test]
fn gen_random_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let a = gen(tmp.path(), "a", &["random", "--seed", "7"]);
    let b = gen(tmp.path(), "b", &["random", "--seed", "7"]);
    for f in ["d_self.mtx", "d_next.mtx", "d_prev.mtx", "layout.txt", MANIFEST_FILE] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn gen_rotvec_declares_rotating_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "rv", &["rotvec", "--sectors", "6", "--points", "2"]);
    let layout = fs::read_to_string(dir.join("layout.txt")).unwrap();
    assert!(layout.lines().any(|l| l == "rotating_pairs = 0:1"));
}

#[test]
fn gen_rejects_bad_parameters_and_paths() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["gen", "ring", "--sectors", "2", "--out", p(&tmp.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = run(&["gen", "rotvec", "--out", p(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn manifest_reconstructs_generator() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["ring", "--sectors", "5", "--points", "3", "--peclet", "2.5", "--rotation-rate", "0.75"],
        vec!["rotvec", "--sectors", "7", "--points", "2", "--coupling", "0.45"],
        vec!["random", "--sectors", "4", "--points", "6", "--density", "0.3", "--seed", "11", "--rotating"],
    ] {
        let dir = gen(tmp.path(), args[0], &args);
        let manifest = fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap();
        let again = tmp.path().join(format!("{}-again", args[0]));
        let parsed = GenArgs::from_manifest(&manifest, &again).unwrap();
        cyclosym_cli::cmd_gen(&parsed).unwrap();
        for f in ["d_self.mtx", "d_next.mtx", "d_prev.mtx", "layout.txt", MANIFEST_FILE] {
            assert_eq!(fs::read(dir.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn eig_reduced_ring_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "24"]);
    let csv = tmp.path().join("m2.csv");
    ok(&["eig", "--input", p(&dir), "--method", "2", "--shifts", "0+1i,0+2i,0+3i", "--k", "2", "--out", p(&csv)]);
    let rows = read_csv(&csv);
    let raw: usize = summary_value(&csv, "eigenvalues_before_dedup").parse().unwrap();
    assert!(raw <= 132);
    assert!(rows.len() <= raw);
    assert_eq!(summary_value(&csv, "duplicates_removed").parse::<usize>().unwrap(), raw - rows.len());
    for r in &rows {
        let m: usize = r.harmonic.parse().unwrap();
        assert_eq!(r.nodal_diameter.parse::<usize>().unwrap(), m.min(22 - m));
        assert!(r.residual <= 1e-10);
    }
}

#[test]
fn eig_full_method_has_no_harmonic_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "6"]);
    let csv = tmp.path().join("m1.csv");
    ok(&["eig", "--input", p(&dir), "--method", "1", "--k", "6", "--out", p(&csv)]);
    let rows = read_csv(&csv);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.harmonic.is_empty() && r.nodal_diameter.is_empty()));
    assert_eq!(summary_value(&csv, "operator_dim"), "132");
}

#[test]
fn eig_output_is_deterministic_and_sorted() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "rv", &["rotvec", "--sectors", "8", "--points", "4"]);
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    for out in [&a, &b] {
        ok(&["eig", "--input", p(&dir), "--shifts", "-1+0.5i,-0.5-1i", "--k", "3", "--out", p(out)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let rows = read_csv(&a);
    let keys: Vec<(usize, f64, f64)> =
        rows.iter().map(|r| (r.harmonic.parse().unwrap(), r.lambda.im, r.lambda.re)).collect();
    for w in keys.windows(2) {
        assert!(w[0].0 < w[1].0 || (w[0].0 == w[1].0 && (w[0].1, w[0].2) <= (w[1].1, w[1].2)));
    }
}

#[test]
fn eig_scale_divides_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "8"]);
    let unscaled = tmp.path().join("s1.csv");
    let scaled = tmp.path().join("s1680.csv");
    let s = 1680.0f64;
    ok(&["eig", "--input", p(&dir), "--shifts", "0+1i,0+2i", "--k", "2", "--out", p(&unscaled)]);
    let shifts = format!("0+{}i,0+{}i", 1.0 / s, 2.0 / s);
    ok(&["eig", "--input", p(&dir), "--shifts", &shifts, "--k", "2", "--scale", "1680", "--out", p(&scaled)]);
    let a = read_csv(&unscaled);
    let b = read_csv(&scaled);
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.harmonic, y.harmonic);
        // relative in unscaled units, with unit floor for the zero mode
        assert!((x.lambda / s - y.lambda).norm() <= 1e-10 * x.lambda.norm().max(1.0) / s);
    }
}

#[test]
fn eig_nonconvergence_is_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "rv", &["rotvec", "--sectors", "6", "--points", "30"]);
    let csv = tmp.path().join("w.csv");
    let stdout = ok(&[
        "eig", "--input", p(&dir), "--k", "3", "--subspace", "7", "--max-restarts", "0", "--tol", "1e-300", "--out",
        p(&csv),
    ]);
    assert!(stdout.contains("warning"));
    assert!(summary_value(&csv, "warnings").parse::<usize>().unwrap() > 0);
}

#[test]
fn eig_reports_io_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["eig", "--input", p(&tmp.path().join("missing")), "--out", p(&tmp.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "4", "--points", "2"]);
    let out = run(&["eig", "--input", p(&dir), "--shifts", "oops", "--out", p(&tmp.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let ring = gen(tmp.path(), "ring", &["ring", "--sectors", "4", "--points", "1"]);
    assert!(ok(&["verify", "--input", p(&ring), "--tol", "1e-10"]).contains("PASS"));
    let rv = gen(tmp.path(), "rv", &["rotvec", "--sectors", "6", "--points", "2"]);
    assert!(ok(&["verify", "--input", p(&rv), "--tol", "1e-8"]).contains("PASS"));
    let out = run(&["verify", "--input", p(&rv), "--tol", "1e-8", "--no-rotation"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn verify_refuses_oversized_instances() {
    let tmp = tempfile::tempdir().unwrap();
    let ring = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "10"]);
    let out = run(&["verify", "--input", p(&ring), "--budget", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("smaller instance"));
}

#[test]
fn verify_pass_covers_every_eig_row() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "rv", &["rotvec", "--sectors", "7", "--points", "5", "--coupling", "0.6"]);
    assert!(ok(&["verify", "--input", p(&dir), "--tol", "1e-8"]).contains("PASS"));
    let csv = tmp.path().join("rows.csv");
    ok(&["eig", "--input", p(&dir), "--shifts", "-1+1i,-1-1i,0+2i", "--k", "4", "--out", p(&csv)]);
    let j = SectorJacobian::read_dir(&dir).unwrap();
    let oracle = dense_eigenvalues(&j.materialize_full(usize::MAX).unwrap().to_dense(), usize::MAX).unwrap();
    for r in read_csv(&csv) {
        assert!(distance_to_set(r.lambda, &oracle) <= 1e-8);
    }
}

#[test]
fn bench_compares_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "ring", &["ring", "--sectors", "22", "--points", "12"]);
    let csv = tmp.path().join("bench.csv");
    ok(&["bench", "--input", p(&dir), "--k", "4", "--out", p(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next().unwrap(), cyclosym_cli::BENCH_HEADER);
    assert_eq!(rows.len(), 2);
    let (full, reduced) = (&rows[0], &rows[1]);
    assert_eq!((full[0], reduced[0]), ("1", "2"));
    assert_eq!(full[1].parse::<usize>().unwrap(), 22 * reduced[1].parse::<usize>().unwrap());
    assert!(reduced[4].parse::<usize>().unwrap() < full[4].parse::<usize>().unwrap());
}

#[test]
fn bench_single_sector_methods_coincide() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = gen(tmp.path(), "one", &["random", "--sectors", "1", "--points", "30", "--seed", "3"]);
    let csv = tmp.path().join("bench.csv");
    ok(&["bench", "--input", p(&dir), "--shifts", "-2+0i", "--k", "3", "--out", p(&csv)]);
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][1], rows[1][1]);
    assert_eq!(rows[0][2], rows[1][2]);
    assert_eq!(rows[0][4], rows[1][4]);
}

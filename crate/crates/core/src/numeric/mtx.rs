//! Matrix Market exchange format, `coordinate complex general`.
//!
//! Entries are written one per line as `row col re im` with 1-based indices.
//! Values use Rust's shortest round-trip formatting, so a write/read cycle
//! reproduces every value bit for bit. The reader also accepts `real` and
//! `integer` fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::CsrMatrix;
use crate::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

pub fn to_string(a: &CsrMatrix) -> String {
    let mut out = String::with_capacity(32 * (a.nnz() + 2));
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", a.nrows(), a.ncols(), a.nnz()));
    for (r, c, v) in a.triplets() {
        out.push_str(&format!("{} {} {:e} {:e}\n", r + 1, c + 1, v.re, v.im));
    }
    out
}

pub fn write(path: &Path, a: &CsrMatrix) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(to_string(a).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<CsrMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path)
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Complex,
    Real,
}

pub fn parse(text: &str, path: &Path) -> Result<CsrMatrix> {
    let err = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(err(1, "only coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" | "integer" => Field::Real,
        other => return Err(err(1, &format!("unsupported field `{other}`"))),
    };
    if tokens[4] != "general" {
        return Err(err(1, "only general symmetry is supported"));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(err(lineno, "size line must be `rows cols nnz`"));
                }
                let nums: Vec<usize> = parts
                    .iter()
                    .map(|p| p.parse().map_err(|_| err(lineno, "invalid size")))
                    .collect::<Result<_>>()?;
                size = Some((nums[0], nums[1], nums[2]));
                triplets.reserve(nums[2]);
            }
            Some((nrows, ncols, _)) => {
                let expected = if field == Field::Complex { 4 } else { 3 };
                if parts.len() != expected {
                    return Err(err(lineno, &format!("expected {expected} fields per entry")));
                }
                let r: usize = parts[0].parse().map_err(|_| err(lineno, "invalid row index"))?;
                let c: usize = parts[1].parse().map_err(|_| err(lineno, "invalid column index"))?;
                if r == 0 || c == 0 || r > nrows || c > ncols {
                    return Err(err(lineno, "index out of range (indices are 1-based)"));
                }
                let re: f64 = parts[2].parse().map_err(|_| err(lineno, "invalid value"))?;
                let im: f64 = if field == Field::Complex {
                    parts[3].parse().map_err(|_| err(lineno, "invalid value"))?
                } else {
                    0.0
                };
                if !re.is_finite() || !im.is_finite() {
                    return Err(err(lineno, "non-finite value"));
                }
                triplets.push((r - 1, c - 1, Complex64::new(re, im)));
            }
        }
    }
    let (nrows, ncols, nnz) = size.ok_or_else(|| err(1, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(err(
            text.lines().count(),
            &format!("expected {nnz} entries, found {}", triplets.len()),
        ));
    }
    CsrMatrix::from_triplets(nrows, ncols, triplets)
}

//! Matrix Market coordinate format. Values are written with the shortest
//! representation that parses back to the same bits.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{LgtError, Result};
use crate::sparse::{CsrMatrix, Scalar};

pub fn write_matrix_market<T: Scalar>(m: &CsrMatrix<T>) -> String {
    let field = if T::IS_COMPLEX { "complex" } else { "real" };
    let mut s = format!("%%MatrixMarket matrix coordinate {field} general\n");
    let _ = writeln!(s, "{} {} {}", m.dim(), m.dim(), m.nnz());
    for i in 0..m.dim() {
        for (j, v) in m.row(i) {
            let z = v.to_c64();
            if T::IS_COMPLEX {
                let _ = writeln!(s, "{} {} {:?} {:?}", i + 1, j + 1, z.re, z.im);
            } else {
                let _ = writeln!(s, "{} {} {:?}", i + 1, j + 1, z.re);
            }
        }
    }
    s
}

fn perr<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(LgtError::Parse(format!("line {line}: {msg}")))
}

/// Reads real or complex, general, symmetric or Hermitian coordinate files
/// into a complex matrix.
pub fn read_matrix_market(text: &str) -> Result<CsrMatrix<Complex64>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| LgtError::Parse("empty file".into()))?;
    let h: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return perr(1, "expected a coordinate Matrix Market header");
    }
    let complex = match h[3].as_str() {
        "real" | "integer" => false,
        "complex" => true,
        other => return perr(1, format!("unsupported field {other}")),
    };
    let sym = match h[4].as_str() {
        "general" => None,
        "symmetric" => Some(false),
        "hermitian" => Some(true),
        other => return perr(1, format!("unsupported symmetry {other}")),
    };
    let mut size = None;
    let mut trip = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let w: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            if w.len() != 3 {
                return perr(ln + 1, "expected `rows cols nnz`");
            }
            let p = |x: &str| x.parse::<usize>().map_err(|e| LgtError::Parse(format!("line {}: {e}", ln + 1)));
            let (r, c, nnz) = (p(w[0])?, p(w[1])?, p(w[2])?);
            if r != c {
                return perr(ln + 1, "matrix must be square");
            }
            size = Some((r, nnz));
            continue;
        }
        let n = size.unwrap().0;
        let want = if complex { 4 } else { 3 };
        if w.len() != want {
            return perr(ln + 1, format!("expected {want} fields"));
        }
        let idx = |x: &str| x.parse::<usize>().map_err(|e| LgtError::Parse(format!("line {}: {e}", ln + 1)));
        let val = |x: &str| x.parse::<f64>().map_err(|e| LgtError::Parse(format!("line {}: {e}", ln + 1)));
        let (i, j) = (idx(w[0])?, idx(w[1])?);
        if i == 0 || j == 0 || i > n || j > n {
            return perr(ln + 1, "index out of range");
        }
        let v = Complex64::new(val(w[2])?, if complex { val(w[3])? } else { 0.0 });
        trip.push((i - 1, j - 1, v));
        if let Some(herm) = sym {
            if i != j {
                trip.push((j - 1, i - 1, if herm { v.conj() } else { v }));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| LgtError::Parse("missing size line".into()))?;
    let stored = if sym.is_some() { trip.iter().filter(|t| t.0 >= t.1).count() } else { trip.len() };
    if stored != nnz {
        return Err(LgtError::Parse(format!("expected {nnz} entries, found {stored}")));
    }
    CsrMatrix::from_triplets(n, &trip)
}

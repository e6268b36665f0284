//! Matrix Market reading and writing.
//!
//! Supported: `coordinate` with `real` or `integer` values and `general` or
//! `symmetric` storage, and `array` with `real` or `integer` values and
//! `general` or `symmetric` storage. Symmetric coordinate files must list
//! the lower triangle only. Values are written in shortest round-trip form,
//! so a write followed by a read reproduces every bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::krylov::CsrMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub enum MtxMatrix {
    Dense(Matrix),
    Sparse(CsrMatrix),
}

impl MtxMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MtxMatrix::Dense(m) => m.shape(),
            MtxMatrix::Sparse(s) => (s.rows(), s.cols()),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match self {
            MtxMatrix::Dense(m) => m.clone(),
            MtxMatrix::Sparse(s) => s.to_dense(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Result<(Layout, bool)> {
    let lower = line.to_ascii_lowercase();
    let tok: Vec<&str> = lower.split_whitespace().collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" || tok[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match tok[2] {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(1, format!("unsupported format '{other}'"))),
    };
    match tok[3] {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    }
    let symmetric = match tok[4] {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok((layout, symmetric))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

/// Parses Matrix Market text. Errors carry the 1-based line number.
pub fn parse_matrix_market(text: &str) -> Result<MtxMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (layout, symmetric) = parse_header(header)?;
    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let size: Vec<&str> = size.split_whitespace().collect();
    let expect = if layout == Layout::Coordinate { 3 } else { 2 };
    if size.len() != expect {
        return Err(parse_err(size_line, format!("size line needs {expect} integers")));
    }
    let rows: usize = parse_num(size[0], size_line, "row count")?;
    let cols: usize = parse_num(size[1], size_line, "column count")?;
    if symmetric && rows != cols {
        return Err(parse_err(size_line, "symmetric matrix must be square"));
    }
    match layout {
        Layout::Coordinate => {
            let nnz: usize = parse_num(size[2], size_line, "entry count")?;
            let mut trip = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
            let (mut last, mut seen) = (size_line, 0);
            for (ln, l) in data {
                if seen == nnz {
                    return Err(parse_err(ln, format!("more than {nnz} entries")));
                }
                let tok: Vec<&str> = l.split_whitespace().collect();
                if tok.len() != 3 {
                    return Err(parse_err(ln, "coordinate entry needs 'row col value'"));
                }
                let i: usize = parse_num(tok[0], ln, "row index")?;
                let j: usize = parse_num(tok[1], ln, "column index")?;
                let v: f64 = parse_num(tok[2], ln, "value")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(ln, format!("index ({i}, {j}) outside {rows}x{cols}")));
                }
                if symmetric && j > i {
                    return Err(parse_err(ln, "symmetric storage lists the lower triangle only"));
                }
                trip.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
                last = ln;
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(last, format!("expected {nnz} entries, found {seen}")));
            }
            Ok(MtxMatrix::Sparse(CsrMatrix::from_triplets(rows, cols, &trip)?))
        }
        Layout::Array => {
            let total = if symmetric { rows * (rows + 1) / 2 } else { rows * cols };
            let mut vals = Vec::with_capacity(total);
            let mut last = size_line;
            for (ln, l) in data {
                for tok in l.split_whitespace() {
                    if vals.len() == total {
                        return Err(parse_err(ln, format!("more than {total} values")));
                    }
                    vals.push(parse_num::<f64>(tok, ln, "value")?);
                }
                last = ln;
            }
            if vals.len() != total {
                return Err(parse_err(last, format!("expected {total} values, found {}", vals.len())));
            }
            if !symmetric {
                return Ok(MtxMatrix::Dense(Matrix::from_col_major(rows, cols, vals)?));
            }
            let mut m = Matrix::zeros(rows, cols);
            let mut it = vals.into_iter();
            for j in 0..cols {
                for i in j..rows {
                    let v = it.next().expect("length checked");
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            Ok(MtxMatrix::Dense(m))
        }
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MtxMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text)
}

/// Dense `array real general` text.
pub fn format_array(m: &Matrix) -> String {
    let mut s = String::with_capacity(24 * m.rows() * m.cols() + 64);
    s.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", m.rows(), m.cols());
    for v in m.data() {
        let _ = writeln!(s, "{v:e}");
    }
    s
}

/// Sparse `coordinate real general` text, entries in row order.
pub fn format_coordinate(a: &CsrMatrix) -> String {
    let mut s = String::with_capacity(32 * a.nnz() + 64);
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for i in 0..a.rows() {
        for (j, v) in a.row(i) {
            let _ = writeln!(s, "{} {} {v:e}", i + 1, j + 1);
        }
    }
    s
}

pub fn write_array(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    Ok(fs::write(path, format_array(m))?)
}

pub fn write_coordinate(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    Ok(fs::write(path, format_coordinate(a))?)
}

//! Dense column-major matrices and column-block layouts.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::precision::Precision;

/// Dense real matrix, column-major, binary64 storage.
///
/// The precision tag records the format the values were produced in; the
/// kernels take their working precision as an explicit argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    precision: Precision,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            precision: Precision::Fine,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from column-major data, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % rows.max(1),
                col: pos / rows.max(1),
            });
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            precision: Precision::Fine,
        })
    }

    /// Unvalidated constructor for kernel outputs.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix {
            rows,
            cols,
            data,
            precision: Precision::Fine,
        }
    }

    /// Builds a matrix from row slices. Panics on ragged rows; intended for
    /// literals in tests and examples.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            precision: Precision::Fine,
        }
    }

    pub fn column_vector(v: &[f64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
            precision: Precision::Fine,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    /// Rounds every entry to `precision` and tags the result.
    pub fn rounded(mut self, precision: Precision) -> Self {
        if precision.is_coarse() {
            for x in &mut self.data {
                *x = *x as f32 as f64;
            }
        }
        self.precision = precision;
        self
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Copy of the columns in `range`.
    pub fn columns(&self, range: Range<usize>) -> Matrix {
        assert!(range.end <= self.cols, "column range out of bounds");
        Matrix {
            rows: self.rows,
            cols: range.len(),
            data: self.data[range.start * self.rows..range.end * self.rows].to_vec(),
            precision: self.precision,
        }
    }

    /// Copy of the sub-matrix `rows x cols`.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Matrix {
        assert!(rows.end <= self.rows && cols.end <= self.cols, "block out of bounds");
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (jo, j) in cols.enumerate() {
            out.col_mut(jo)
                .copy_from_slice(&self.col(j)[rows.start..rows.end]);
        }
        out.precision = self.precision;
        out
    }

    /// Writes `src` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Matrix) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols);
        for j in 0..src.cols {
            self.col_mut(c0 + j)[r0..r0 + src.rows].copy_from_slice(src.col(j));
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hcat",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
            precision: self.precision,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t.precision = self.precision;
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= alpha);
        out
    }

    /// Entrywise `self - other` in binary64.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Entrywise `self + other` in binary64.
    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    fn zip_with(&self, other: &Matrix, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
            precision: self.precision,
        })
    }

    /// Euclidean norms of the columns.
    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|j| norm2(self.col(j))).collect()
    }

    /// True when every entry strictly below the diagonal is zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.cols).all(|j| self.col(j).iter().skip(j + 1).all(|&x| x == 0.0))
    }

    /// Appends the columns of `other` in place.
    pub fn append_columns(&mut self, other: &Matrix) -> Result<()> {
        if self.cols > 0 && self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "append_columns",
                left: self.shape(),
                right: other.shape(),
            });
        }
        self.rows = other.rows;
        self.cols += other.cols;
        self.data.extend_from_slice(&other.data);
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// Scaled Euclidean norm, safe against overflow for large entries.
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let ssq: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * ssq.sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Column-block layout of an `m`-column matrix.
///
/// Blocks are contiguous. The uniform layout has `p - 1` blocks of width
/// `m_p` followed by a tail of width `1..=m_p`; arbitrary widths are allowed
/// for the s-step basis (one leading column, then blocks of width `s`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    offsets: Vec<usize>,
    block_width: usize,
}

impl BlockPartition {
    pub fn uniform(total_cols: usize, block_width: usize) -> Result<Self> {
        if block_width == 0 {
            return Err(invalid("block width must be positive"));
        }
        if total_cols == 0 {
            return Err(invalid("cannot partition zero columns"));
        }
        let mut offsets = vec![0];
        let mut c = 0;
        while c < total_cols {
            c = (c + block_width).min(total_cols);
            offsets.push(c);
        }
        Ok(BlockPartition {
            offsets,
            block_width,
        })
    }

    pub fn from_widths(widths: &[usize]) -> Result<Self> {
        if widths.is_empty() || widths.iter().any(|&w| w == 0) {
            return Err(invalid("block widths must be positive and non-empty"));
        }
        let mut offsets = vec![0];
        for w in widths {
            offsets.push(offsets.last().unwrap() + w);
        }
        Ok(BlockPartition {
            offsets,
            block_width: *widths.iter().max().unwrap(),
        })
    }

    /// Nominal block width `m_p`.
    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_cols(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Column range of block `i` (0-based).
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn width(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Number of columns in blocks `0..i`.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Partition of the leading `i` blocks.
    pub fn leading(&self, i: usize) -> BlockPartition {
        BlockPartition {
            offsets: self.offsets[..=i].to_vec(),
            block_width: self.block_width,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = Matrix::from_col_major(2, 1, vec![1.0, f64::NAN]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 1, col: 0 });
        assert!(matches!(
            Matrix::from_col_major(2, 2, vec![0.0; 3]),
            Err(Error::BadLength { .. })
        ));
    }

    #[test]
    fn uniform_partition_with_ragged_tail() {
        let p = BlockPartition::uniform(23, 10).unwrap();
        assert_eq!(p.num_blocks(), 3);
        assert_eq!(p.range(2), 20..23);
        assert_eq!(p.width(2), 3);
        let exact = BlockPartition::uniform(30, 10).unwrap();
        assert!((0..3).all(|i| exact.width(i) == 10));
    }

    #[test]
    fn widths_partition() {
        let p = BlockPartition::from_widths(&[1, 3, 3]).unwrap();
        assert_eq!(p.total_cols(), 7);
        assert_eq!(p.range(1), 1..4);
        assert_eq!(p.block_width(), 3);
        assert_eq!(p.leading(2).total_cols(), 4);
    }

    #[test]
    fn block_roundtrip() {
        let a = Matrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64);
        let b = a.block(1..3, 1..3);
        assert_eq!(b[(0, 0)], 4.0);
        let mut z = Matrix::zeros(4, 3);
        z.set_block(1, 1, &b);
        assert_eq!(z[(2, 2)], a[(2, 2)]);
        assert_eq!(a.transpose().transpose(), a);
    }
}

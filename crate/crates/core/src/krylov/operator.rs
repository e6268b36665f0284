//! Linear operators acting on dense blocks.

use crate::error::{invalid, Error, Result};
use crate::kernels::gemm;
use crate::matrix::Matrix;
use crate::precision::Precision;

/// A square linear map `X -> A X` on blocks of column vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `A X` in binary64.
    fn apply(&self, x: &Matrix) -> Result<Matrix>;

    /// `A X` under the given roundoff. The default computes in binary64 and
    /// rounds the result.
    fn apply_prec(&self, x: &Matrix, prec: Precision) -> Result<Matrix> {
        Ok(self.apply(x)?.rounded(prec))
    }

    fn description(&self) -> String {
        format!("operator of dimension {}", self.dim())
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        (**self).apply(x)
    }
    fn apply_prec(&self, x: &Matrix, prec: Precision) -> Result<Matrix> {
        (**self).apply_prec(x, prec)
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        (**self).apply(x)
    }
    fn apply_prec(&self, x: &Matrix, prec: Precision) -> Result<Matrix> {
        (**self).apply_prec(x, prec)
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

fn check_rows(op: &'static str, dim: usize, x: &Matrix) -> Result<()> {
    if x.rows() != dim {
        return Err(Error::DimensionMismatch { op, left: (dim, dim), right: x.shape() });
    }
    Ok(())
}

/// Dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    a: Matrix,
}

impl DenseOperator {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(invalid(format!("operator matrix must be square, got {:?}", a.shape())));
        }
        Ok(DenseOperator { a })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.apply_prec(x, Precision::Fine)
    }

    fn apply_prec(&self, x: &Matrix, prec: Precision) -> Result<Matrix> {
        check_rows("dense operator", self.dim(), x)?;
        gemm(1.0, &self.a, x, 0.0, None, prec)
    }

    fn description(&self) -> String {
        format!("dense {}x{}", self.dim(), self.dim())
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from 0-based `(row, col, value)` triplets. Duplicates are
    /// summed in input order; column indices end up sorted within each row.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|t| t.0 >= rows || t.1 >= cols) {
            return Err(invalid(format!("entry ({i}, {j}) outside a {rows}x{cols} matrix")));
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        // stable sort keeps the summation order of duplicates deterministic
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut row = 0;
        for &t in &order {
            let (i, j, v) = triplets[t];
            while row < i {
                row += 1;
                indptr[row] = indices.len();
            }
            if indices.len() > indptr[i] && *indices.last().unwrap() == j {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
            }
        }
        while row < rows {
            row += 1;
            indptr[row] = indices.len();
        }
        Ok(CsrMatrix { rows, cols, indptr, indices, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Row-by-row sparse product in binary64.
    pub fn matmul(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.cols {
            return Err(Error::DimensionMismatch { op: "csr matmul", left: (self.rows, self.cols), right: x.shape() });
        }
        let mut out = Matrix::zeros(self.rows, x.cols());
        for c in 0..x.cols() {
            let xc = x.col(c);
            let oc = out.col_mut(c);
            for (i, o) in oc.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in self.indptr[i]..self.indptr[i + 1] {
                    acc += self.values[k] * xc[self.indices[k]];
                }
                *o = acc;
            }
        }
        Ok(out)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(invalid("sparse operator must be square"));
        }
        self.matmul(x)
    }

    fn description(&self) -> String {
        format!("sparse {}x{} with {} nonzeros", self.rows, self.cols, self.nnz())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    /// `alpha I + A`
    Plus,
    /// `alpha I - A`
    Minus,
}

/// `alpha I + A` or `alpha I - A`.
#[derive(Debug, Clone)]
pub struct Shifted<A> {
    pub inner: A,
    pub alpha: f64,
    pub sign: ShiftSign,
}

impl<A: LinearOperator> Shifted<A> {
    pub fn new(inner: A, alpha: f64, sign: ShiftSign) -> Self {
        Shifted { inner, alpha, sign }
    }
}

impl<A: LinearOperator> LinearOperator for Shifted<A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        let ax = self.inner.apply(x)?;
        let s = match self.sign {
            ShiftSign::Plus => 1.0,
            ShiftSign::Minus => -1.0,
        };
        let mut out = ax;
        for (o, &xv) in out.data_mut().iter_mut().zip(x.data()) {
            *o = self.alpha * xv + s * *o;
        }
        Ok(out)
    }

    fn description(&self) -> String {
        let s = match self.sign {
            ShiftSign::Plus => '+',
            ShiftSign::Minus => '-',
        };
        format!("{} I {s} ({})", self.alpha, self.inner.description())
    }
}

/// `A M`: applies `inner` first, then `outer`.
#[derive(Debug, Clone)]
pub struct Composed<A, M> {
    pub outer: A,
    pub inner: M,
}

impl<A: LinearOperator, M: LinearOperator> Composed<A, M> {
    pub fn new(outer: A, inner: M) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(invalid(format!("cannot compose operators of sizes {} and {}", outer.dim(), inner.dim())));
        }
        Ok(Composed { outer, inner })
    }
}

impl<A: LinearOperator, M: LinearOperator> LinearOperator for Composed<A, M> {
    fn dim(&self) -> usize {
        self.outer.dim()
    }

    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.outer.apply(&self.inner.apply(x)?)
    }

    fn description(&self) -> String {
        format!("({}) * ({})", self.outer.description(), self.inner.description())
    }
}

/// Identity map of a given size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        check_rows("identity operator", self.0, x)?;
        Ok(x.clone().with_precision(Precision::Fine))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn csr_matches_dense() {
        let a = lap1d(6);
        let x = Matrix::from_fn(6, 2, |i, j| (i * 3 + j) as f64 - 4.0);
        let d = DenseOperator::new(a.to_dense()).unwrap();
        assert_eq!(a.apply(&x).unwrap(), d.apply(&x).unwrap());
        assert_eq!(a.nnz(), 16);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 0, 1.5), (0, 1, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(a.to_dense(), Matrix::from_rows(&[&[0.0, 2.0], &[2.0, 0.0]]));
        assert_eq!(a.indptr(), &[0, 1, 2]);
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn empty_rows_are_kept() {
        let a = CsrMatrix::from_triplets(4, 4, &[(2, 3, 1.0)]).unwrap();
        assert_eq!(a.indptr(), &[0, 0, 0, 1, 1]);
    }

    #[test]
    fn shift_and_compose() {
        let a = DenseOperator::new(Matrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        let x = Matrix::column_vector(&[1.0, 1.0, 1.0]);
        let plus = Shifted::new(&a, 2.0, ShiftSign::Plus).apply(&x).unwrap();
        let minus = Shifted::new(&a, 2.0, ShiftSign::Minus).apply(&x).unwrap();
        assert_eq!(plus.data(), &[3.0, 4.0, 5.0]);
        assert_eq!(minus.data(), &[1.0, 0.0, -1.0]);
        let c = Composed::new(&a, &a).unwrap().apply(&x).unwrap();
        assert_eq!(c.data(), &[1.0, 4.0, 9.0]);
    }

    #[test]
    fn wrong_size_is_rejected() {
        let a = DenseOperator::new(Matrix::identity(3)).unwrap();
        assert!(a.apply(&Matrix::zeros(4, 1)).is_err());
        assert!(DenseOperator::new(Matrix::zeros(2, 3)).is_err());
        assert!(Composed::new(IdentityOperator(2), IdentityOperator(3)).is_err());
    }
}

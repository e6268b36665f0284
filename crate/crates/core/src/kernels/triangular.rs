//! Cholesky factorization and triangular solves (binary64).

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Solve `R X = B`.
    Left,
    /// Solve `X R = B`.
    Right,
}

/// Upper Cholesky factor `R` with `R^T R = G`.
///
/// Only the upper triangle of `G` is read. A non-positive pivot at column `j`
/// (1-based) returns [`Error::NotPositiveDefinite`].
pub fn cholesky(g: &Matrix) -> Result<Matrix> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            op: "cholesky",
            left: g.shape(),
            right: (g.rows(), g.rows()),
        });
    }
    let m = g.rows();
    let mut r = Matrix::zeros(m, m);
    for j in 0..m {
        for i in 0..=j {
            let mut s = g[(i, j)];
            for l in 0..i {
                s -= r[(l, i)] * r[(l, j)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { column: j + 1 });
                }
                r[(j, j)] = s.sqrt();
            } else {
                r[(i, j)] = s / r[(i, i)];
            }
        }
    }
    Ok(r)
}

/// Solves with an upper triangular `R`. A zero diagonal entry returns
/// [`Error::ZeroDiagonal`] with its 0-based index.
pub fn triangular_solve(r: &Matrix, b: &Matrix, side: Side) -> Result<Matrix> {
    let m = r.rows();
    if !r.is_square() {
        return Err(Error::DimensionMismatch {
            op: "triangular_solve",
            left: r.shape(),
            right: b.shape(),
        });
    }
    if let Some(index) = (0..m).find(|&i| r[(i, i)] == 0.0) {
        return Err(Error::ZeroDiagonal { index });
    }
    match side {
        Side::Left => {
            if b.rows() != m {
                return Err(Error::DimensionMismatch {
                    op: "triangular_solve (left)",
                    left: r.shape(),
                    right: b.shape(),
                });
            }
            let mut x = b.clone().with_precision(crate::Precision::Fine);
            for c in 0..x.cols() {
                let col = x.col_mut(c);
                for i in (0..m).rev() {
                    let xi = col[i] / r[(i, i)];
                    col[i] = xi;
                    let rc = r.col(i);
                    for l in 0..i {
                        col[l] -= rc[l] * xi;
                    }
                }
            }
            Ok(x)
        }
        Side::Right => {
            if b.cols() != m {
                return Err(Error::DimensionMismatch {
                    op: "triangular_solve (right)",
                    left: r.shape(),
                    right: b.shape(),
                });
            }
            // X R = B, column j: X[:, j] = (B[:, j] - sum_{l<j} X[:, l] R[l, j]) / R[j, j]
            let n = b.rows();
            let mut x = b.clone().with_precision(crate::Precision::Fine);
            for j in 0..m {
                for l in 0..j {
                    let rlj = r[(l, j)];
                    if rlj == 0.0 {
                        continue;
                    }
                    let (done, rest) = x.data_mut().split_at_mut(j * n);
                    let xl = &done[l * n..(l + 1) * n];
                    for (xj, &v) in rest[..n].iter_mut().zip(xl) {
                        *xj -= v * rlj;
                    }
                }
                let d = r[(j, j)];
                x.col_mut(j).iter_mut().for_each(|v| *v /= d);
            }
            Ok(x)
        }
    }
}

/// Explicit inverse of an upper triangular matrix.
pub fn triangular_inverse(r: &Matrix) -> Result<Matrix> {
    triangular_solve(r, &Matrix::identity(r.rows()), Side::Left)
}
